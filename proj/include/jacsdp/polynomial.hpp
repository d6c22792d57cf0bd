#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace jacsdp {

using Rational = mpq_class;

/// Exponent vector x^α of a monomial in a fixed number of variables.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(int nvars) : exps_(static_cast<std::size_t>(nvars), 0) {}
  explicit Monomial(std::vector<int> exps);
  Monomial(std::initializer_list<int> exps) : Monomial(std::vector<int>(exps)) {}

  /// x_i as a monomial (0-based variable index).
  static Monomial variable(int nvars, int i);

  int nvars() const { return static_cast<int>(exps_.size()); }
  int degree() const { return degree_; }
  int operator[](int i) const { return exps_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& exponents() const { return exps_; }

  double evaluate(std::span<const double> point) const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.exps_ == b.exps_;
  }

 private:
  std::vector<int> exps_;
  int degree_ = 0;
};

/// Canonical basis order: total degree ascending, ties broken so that
/// monomials heavier in lower-indexed variables come first
/// (1, x1, x2, x1^2, x1*x2, x2^2, ...).
struct GradedOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

struct MonomialHash {
  std::size_t operator()(const Monomial& m) const;
};

/// Sparse multivariate polynomial with exact rational coefficients.
/// Zero coefficients are never stored.
class Polynomial {
 public:
  using TermMap = std::map<Monomial, Rational, GradedOrder>;

  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}
  Polynomial(int nvars, TermMap terms);

  static Polynomial constant(int nvars, const Rational& c);
  static Polynomial variable(int nvars, int i);
  static Polynomial monomial(const Monomial& m, const Rational& c = 1);

  int nvars() const { return nvars_; }
  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  std::size_t num_terms() const { return terms_.size(); }
  const TermMap& terms() const { return terms_; }
  Rational coefficient(const Monomial& m) const;

  double evaluate(std::span<const double> point) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Rational& scalar);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= Rational(-1); }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

  Polynomial pow(int e) const;

 private:
  void check_compatible(const Polynomial& other) const;
  void add_term(const Monomial& m, const Rational& c);

  int nvars_ = 0;
  TermMap terms_;
};

/// Exact partial derivative with respect to variable i (0-based).
Polynomial partial(const Polynomial& p, int i);
std::vector<Polynomial> gradient(const Polynomial& p);

/// p(s_1 x_1, ..., s_n x_n), computed exactly.
Polynomial scale_variables(const Polynomial& p, std::span<const Rational> s);

/// Default variable names x1, ..., xn.
std::vector<std::string> default_variable_names(int nvars);

/// Canonical text: highest degree first, `*` products, `^` powers,
/// rational coefficients as p/q.
std::string to_string(const Polynomial& p, const std::vector<std::string>& names);
std::string to_string(const Polynomial& p);
std::string to_string(const Rational& r);

/// Dense row-major matrix of polynomials sharing one variable count.
class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(int rows, int cols, int nvars);
  /// Builds a matrix from its columns.
  static PolyMatrix from_columns(const std::vector<std::vector<Polynomial>>& columns);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int nvars() const { return nvars_; }
  const Polynomial& operator()(int r, int c) const { return data_[index(r, c)]; }
  void set(int r, int c, Polynomial p);

  /// Numeric matrix of entries evaluated at a point, row-major.
  std::vector<double> evaluate(std::span<const double> point) const;

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  int nvars_ = 0;
  std::vector<Polynomial> data_;
};

/// Exact determinant by cofactor expansion along the sparsest line.
Polynomial determinant(const PolyMatrix& m);

/// Determinant of the submatrix selected by strictly increasing 0-based
/// row and column index sets of equal size.
Polynomial minor(const PolyMatrix& m, std::span<const int> rows, std::span<const int> cols);

/// All monomials in n variables of degree <= d, in GradedOrder.
/// The length is C(n+d, d).
std::vector<Monomial> monomials_up_to(int n, int d);

/// Binomial coefficient C(n, k) for small arguments.
long long binomial(int n, int k);

}  // namespace jacsdp
