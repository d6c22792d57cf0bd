#include "jacsdp/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace jacsdp {

Monomial::Monomial(std::vector<int> exps) : exps_(std::move(exps)) {
  for (int e : exps_) {
    if (e < 0) throw std::invalid_argument("negative exponent in monomial");
    degree_ += e;
  }
}

Monomial Monomial::variable(int nvars, int i) {
  if (i < 0 || i >= nvars) throw std::out_of_range("variable index out of range");
  std::vector<int> e(static_cast<std::size_t>(nvars), 0);
  e[static_cast<std::size_t>(i)] = 1;
  return Monomial(std::move(e));
}

double Monomial::evaluate(std::span<const double> point) const {
  double v = 1.0;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    for (int k = 0; k < exps_[i]; ++k) v *= point[i];
  }
  return v;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  if (a.nvars() != b.nvars()) throw std::invalid_argument("monomial variable-count mismatch");
  Monomial r = a;
  for (std::size_t i = 0; i < r.exps_.size(); ++i) r.exps_[i] += b.exps_[i];
  r.degree_ = a.degree_ + b.degree_;
  return r;
}

bool GradedOrder::operator()(const Monomial& a, const Monomial& b) const {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  // Same degree: larger exponent on an earlier variable comes first.
  return a.exponents() > b.exponents();
}

std::size_t MonomialHash::operator()(const Monomial& m) const {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (int e : m.exponents()) {
    h ^= static_cast<std::size_t>(e) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

namespace {

// GMP arithmetic assumes canonical operands, but callers may build values
// such as mpq_class(2, 4). Public entry points normalize them once.
Rational canonical(Rational r) {
  r.canonicalize();
  return r;
}

}  // namespace

Polynomial::Polynomial(int nvars, TermMap terms) : nvars_(nvars) {
  for (auto& [m, c] : terms) {
    if (m.nvars() != nvars) throw std::invalid_argument("monomial variable-count mismatch");
    add_term(m, canonical(c));
  }
}

Polynomial Polynomial::constant(int nvars, const Rational& c) {
  Polynomial p(nvars);
  p.add_term(Monomial(nvars), canonical(c));
  return p;
}

Polynomial Polynomial::variable(int nvars, int i) {
  Polynomial p(nvars);
  p.add_term(Monomial::variable(nvars, i), Rational(1));
  return p;
}

Polynomial Polynomial::monomial(const Monomial& m, const Rational& c) {
  Polynomial p(m.nvars());
  p.add_term(m, canonical(c));
  return p;
}

int Polynomial::degree() const {
  if (terms_.empty()) return -1;
  return terms_.rbegin()->first.degree();
}

Rational Polynomial::coefficient(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? Rational(0) : it->second;
}

double Polynomial::evaluate(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != nvars_) {
    throw std::invalid_argument("evaluation point has wrong dimension");
  }
  double v = 0.0;
  for (const auto& [m, c] : terms_) v += c.get_d() * m.evaluate(point);
  return v;
}

void Polynomial::check_compatible(const Polynomial& other) const {
  if (nvars_ != other.nvars_) throw std::invalid_argument("polynomial variable-count mismatch");
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  check_compatible(other);
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  check_compatible(other);
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& scalar) {
  if (scalar == 0) {
    terms_.clear();
    return *this;
  }
  const Rational s = canonical(scalar);
  for (auto& [m, c] : terms_) c *= s;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.check_compatible(b);
  Polynomial r(a.nvars_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) r.add_term(ma * mb, ca * cb);
  }
  return r;
}

Polynomial Polynomial::pow(int e) const {
  if (e < 0) throw std::invalid_argument("negative polynomial power");
  Polynomial result = constant(nvars_, 1);
  Polynomial base = *this;
  while (e > 0) {
    if (e & 1) result = result * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return result;
}

Polynomial partial(const Polynomial& p, int i) {
  if (i < 0 || i >= p.nvars()) throw std::out_of_range("partial: variable index out of range");
  Polynomial::TermMap terms;
  for (const auto& [m, c] : p.terms()) {
    int e = m[i];
    if (e == 0) continue;
    std::vector<int> exps = m.exponents();
    exps[static_cast<std::size_t>(i)] -= 1;
    terms.emplace(Monomial(std::move(exps)), c * e);
  }
  return Polynomial(p.nvars(), std::move(terms));
}

std::vector<Polynomial> gradient(const Polynomial& p) {
  std::vector<Polynomial> g;
  g.reserve(static_cast<std::size_t>(p.nvars()));
  for (int i = 0; i < p.nvars(); ++i) g.push_back(partial(p, i));
  return g;
}

Polynomial scale_variables(const Polynomial& p, std::span<const Rational> s) {
  if (static_cast<int>(s.size()) != p.nvars()) {
    throw std::invalid_argument("scale_variables: one factor per variable expected");
  }
  Polynomial::TermMap terms;
  for (const auto& [m, c] : p.terms()) {
    Rational f = c;
    for (int i = 0; i < p.nvars(); ++i) {
      for (int k = 0; k < m[i]; ++k) f *= s[static_cast<std::size_t>(i)];
    }
    if (f != 0) terms.emplace(m, f);
  }
  return Polynomial(p.nvars(), std::move(terms));
}

std::vector<std::string> default_variable_names(int nvars) {
  std::vector<std::string> names;
  for (int i = 1; i <= nvars; ++i) names.push_back("x" + std::to_string(i));
  return names;
}

std::string to_string(const Rational& r) {
  return r.get_den() == 1 ? r.get_num().get_str() : r.get_str();
}

std::string to_string(const Polynomial& p, const std::vector<std::string>& names) {
  if (static_cast<int>(names.size()) != p.nvars()) {
    throw std::invalid_argument("variable name count mismatch");
  }
  if (p.is_zero()) return "0";
  std::vector<std::pair<const Monomial*, const Rational*>> terms;
  for (const auto& [m, c] : p.terms()) terms.emplace_back(&m, &c);
  std::stable_sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    return a.first->degree() > b.first->degree();
  });
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms) {
    const bool negative = sgn(*c) < 0;
    Rational mag = abs(*c);
    if (first) {
      if (negative) os << '-';
    } else {
      os << (negative ? " - " : " + ");
    }
    first = false;
    bool wrote = false;
    if (mag != 1 || m->degree() == 0) {
      os << to_string(mag);
      wrote = true;
    }
    for (int i = 0; i < m->nvars(); ++i) {
      int e = (*m)[i];
      if (e == 0) continue;
      if (wrote) os << '*';
      os << names[static_cast<std::size_t>(i)];
      if (e > 1) os << '^' << e;
      wrote = true;
    }
  }
  return os.str();
}

std::string to_string(const Polynomial& p) {
  return to_string(p, default_variable_names(p.nvars()));
}

PolyMatrix::PolyMatrix(int rows, int cols, int nvars)
    : rows_(rows), cols_(cols), nvars_(nvars),
      data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), Polynomial(nvars)) {
  if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix size");
}

PolyMatrix PolyMatrix::from_columns(const std::vector<std::vector<Polynomial>>& columns) {
  if (columns.empty()) return PolyMatrix();
  const int rows = static_cast<int>(columns.front().size());
  const int nvars = rows > 0 ? columns.front().front().nvars() : 0;
  PolyMatrix m(rows, static_cast<int>(columns.size()), nvars);
  for (int c = 0; c < m.cols(); ++c) {
    const auto& col = columns[static_cast<std::size_t>(c)];
    if (static_cast<int>(col.size()) != rows) throw std::invalid_argument("ragged columns");
    for (int r = 0; r < rows; ++r) m.set(r, c, col[static_cast<std::size_t>(r)]);
  }
  return m;
}

void PolyMatrix::set(int r, int c, Polynomial p) {
  if (r < 0 || r >= rows_ || c < 0 || c >= cols_) throw std::out_of_range("matrix index");
  if (p.nvars() != nvars_) throw std::invalid_argument("entry variable-count mismatch");
  data_[index(r, c)] = std::move(p);
}

std::vector<double> PolyMatrix::evaluate(std::span<const double> point) const {
  std::vector<double> out(data_.size());
  for (std::size_t k = 0; k < data_.size(); ++k) out[k] = data_[k].evaluate(point);
  return out;
}

namespace {

// Cofactor expansion on the submatrix given by explicit row/column lists.
Polynomial det_rec(const PolyMatrix& m, const std::vector<int>& rows,
                   const std::vector<int>& cols) {
  const std::size_t k = rows.size();
  if (k == 0) return Polynomial::constant(m.nvars(), 1);
  if (k == 1) return m(rows[0], cols[0]);

  // Pick the line with the most zero entries.
  int best_zeros = -1;
  bool best_is_row = true;
  std::size_t best = 0;
  for (std::size_t a = 0; a < k; ++a) {
    int zr = 0, zc = 0;
    for (std::size_t b = 0; b < k; ++b) {
      if (m(rows[a], cols[b]).is_zero()) ++zr;
      if (m(rows[b], cols[a]).is_zero()) ++zc;
    }
    if (zr > best_zeros) { best_zeros = zr; best_is_row = true; best = a; }
    if (zc > best_zeros) { best_zeros = zc; best_is_row = false; best = a; }
  }

  Polynomial result(m.nvars());
  for (std::size_t b = 0; b < k; ++b) {
    const int r = best_is_row ? rows[best] : rows[b];
    const int c = best_is_row ? cols[b] : cols[best];
    const Polynomial& entry = m(r, c);
    if (entry.is_zero()) continue;
    std::vector<int> sub_rows, sub_cols;
    for (std::size_t i = 0; i < k; ++i) {
      if (rows[i] != r) sub_rows.push_back(rows[i]);
      if (cols[i] != c) sub_cols.push_back(cols[i]);
    }
    Polynomial term = entry * det_rec(m, sub_rows, sub_cols);
    if ((best + b) % 2 == 1) {
      result -= term;
    } else {
      result += term;
    }
  }
  return result;
}

void check_index_set(std::span<const int> idx, int bound, const char* what) {
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= bound) throw std::invalid_argument(std::string(what) + " index out of range");
    if (i > 0 && idx[i] <= idx[i - 1]) {
      throw std::invalid_argument(std::string(what) + " indices must be strictly increasing");
    }
  }
}

void append_degree(int n, int remaining, int var, std::vector<int>& cur,
                   std::vector<Monomial>& out) {
  if (var == n - 1) {
    cur[static_cast<std::size_t>(var)] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[static_cast<std::size_t>(var)] = e;
    append_degree(n, remaining - e, var + 1, cur, out);
  }
  cur[static_cast<std::size_t>(var)] = 0;
}

}  // namespace

Polynomial determinant(const PolyMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  std::vector<int> idx(static_cast<std::size_t>(m.rows()));
  std::iota(idx.begin(), idx.end(), 0);
  return det_rec(m, idx, idx);
}

Polynomial minor(const PolyMatrix& m, std::span<const int> rows, std::span<const int> cols) {
  if (rows.size() != cols.size()) throw std::invalid_argument("minor: index sets differ in size");
  check_index_set(rows, m.rows(), "row");
  check_index_set(cols, m.cols(), "column");
  return det_rec(m, std::vector<int>(rows.begin(), rows.end()),
                 std::vector<int>(cols.begin(), cols.end()));
}

std::vector<Monomial> monomials_up_to(int n, int d) {
  if (n < 1 || d < 0) throw std::invalid_argument("monomials_up_to: need n >= 1, d >= 0");
  std::vector<Monomial> out;
  out.reserve(static_cast<std::size_t>(binomial(n + d, d)));
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  for (int deg = 0; deg <= d; ++deg) append_degree(n, deg, 0, cur, out);
  return out;
}

long long binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace jacsdp
