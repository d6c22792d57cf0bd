#include "jacsdp/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace jacsdp {

MomentBasis::MomentBasis(int nvars, int order)
    : nvars_(nvars), order_(order), monomials_(monomials_up_to(nvars, 2 * order)) {
  if (order < 0) throw std::invalid_argument("negative relaxation order");
  index_.reserve(monomials_.size());
  for (std::size_t i = 0; i < monomials_.size(); ++i) index_.emplace(monomials_[i], static_cast<int>(i));
}

int MomentBasis::index(const Monomial& m) const {
  auto it = index_.find(m);
  if (it == index_.end()) throw std::out_of_range("monomial outside the moment basis");
  return it->second;
}

int MomentBasis::prefix_size(int d) const {
  if (d < 0) return 0;
  return static_cast<int>(binomial(nvars_ + d, d));
}

std::string to_string(RelaxationVariant v) {
  switch (v) {
    case RelaxationVariant::kJacobianSchmudgen: return "jacobian-schmudgen";
    case RelaxationVariant::kJacobianAllMinors: return "jacobian-allminors";
    case RelaxationVariant::kJacobianPutinar: return "jacobian-putinar";
    case RelaxationVariant::kInactivePutinar: return "inactive-putinar";
    case RelaxationVariant::kInactiveSchmudgen: return "inactive-schmudgen";
    case RelaxationVariant::kBaselinePutinar: return "baseline-putinar";
    case RelaxationVariant::kBaselineSchmudgen: return "baseline-schmudgen";
  }
  return "unknown";
}

std::vector<RelaxationVariant> all_variants() {
  return {RelaxationVariant::kJacobianSchmudgen, RelaxationVariant::kJacobianAllMinors,
          RelaxationVariant::kJacobianPutinar,   RelaxationVariant::kInactivePutinar,
          RelaxationVariant::kInactiveSchmudgen, RelaxationVariant::kBaselinePutinar,
          RelaxationVariant::kBaselineSchmudgen};
}

std::optional<RelaxationVariant> parse_variant(const std::string& name) {
  for (auto v : all_variants()) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

std::optional<GeneratorVariant> generator_variant(RelaxationVariant v) {
  switch (v) {
    case RelaxationVariant::kJacobianSchmudgen:
    case RelaxationVariant::kJacobianPutinar:
      return GeneratorVariant::kMinimalEta;
    case RelaxationVariant::kJacobianAllMinors:
      return GeneratorVariant::kAllMinors;
    case RelaxationVariant::kInactivePutinar:
    case RelaxationVariant::kInactiveSchmudgen:
      return GeneratorVariant::kInactive;
    case RelaxationVariant::kBaselinePutinar:
    case RelaxationVariant::kBaselineSchmudgen:
      return std::nullopt;
  }
  return std::nullopt;
}

bool uses_cross_products(RelaxationVariant v) {
  return v == RelaxationVariant::kJacobianSchmudgen || v == RelaxationVariant::kJacobianAllMinors ||
         v == RelaxationVariant::kInactiveSchmudgen || v == RelaxationVariant::kBaselineSchmudgen;
}

namespace {

int half_degree_ceil(const Polynomial& q) { return (std::max(q.degree(), 0) + 1) / 2; }

void check_fits(const Polynomial& q, const MomentBasis& basis) {
  if (q.nvars() != basis.nvars()) throw std::invalid_argument("polynomial/basis variable-count mismatch");
  if (q.degree() > 2 * basis.order()) {
    throw OrderTooSmall(basis.order(), half_degree_ceil(q));
  }
}

// Multipliers forming the PSD blocks of a variant.
std::vector<CrossProduct> psd_multipliers(const OptProblem& p, RelaxationVariant v) {
  if (uses_cross_products(v)) {
    if (p.num_inequalities() > kMaxCrossProductInequalities) {
      throw GuardError("too many inequalities for cross products (" +
                       std::to_string(p.num_inequalities()) + " > " +
                       std::to_string(kMaxCrossProductInequalities) + ")");
    }
    return cross_products(p.inequalities, p.nvars);
  }
  std::vector<CrossProduct> out;
  out.push_back({{}, Polynomial::constant(p.nvars, 1)});
  for (int j = 0; j < p.num_inequalities(); ++j) {
    out.push_back({{j}, p.inequalities[static_cast<std::size_t>(j)]});
  }
  return out;
}

std::string row_key(const std::map<int, Rational>& row) {
  // Normalize by the leading coefficient so that scalar multiples coincide.
  const Rational lead = row.begin()->second;
  std::ostringstream os;
  for (const auto& [i, c] : row) {
    Rational v = c / lead;
    os << i << ':' << v.get_str() << ';';
  }
  return os.str();
}

std::string nu_label(const std::vector<int>& nu) {
  if (nu.empty()) return "1";
  std::string s;
  for (int j : nu) {
    if (!s.empty()) s += "*";
    s += "g" + std::to_string(j + 1);
  }
  return s;
}

}  // namespace

LmiBlock localizing_block(const Polynomial& q, int order, const MomentBasis& basis) {
  check_fits(q, basis);
  if (order != basis.order()) throw std::invalid_argument("basis built for a different order");
  LmiBlock block;
  block.half_degree = order - half_degree_ceil(q);
  block.size = basis.prefix_size(block.half_degree);
  block.localized = q;
  for (int i = 0; i < block.size; ++i) {
    for (int j = i; j < block.size; ++j) {
      const Monomial shift = basis.monomial(i) * basis.monomial(j);
      for (const auto& [m, c] : q.terms()) {
        const int idx = basis.index(m * shift);
        auto& entries = block.coeffs[idx];
        if (!entries.empty() && entries.back().row == i && entries.back().col == j) {
          entries.back().value += c;
        } else {
          entries.push_back({i, j, c});
        }
      }
    }
  }
  return block;
}

std::map<int, Rational> objective_vector(const Polynomial& f, const MomentBasis& basis) {
  check_fits(f, basis);
  std::map<int, Rational> c;
  for (const auto& [m, coef] : f.terms()) c[basis.index(m)] = coef;
  return c;
}

std::vector<CrossProduct> cross_products(const std::vector<Polynomial>& g, int nvars) {
  const int m2 = static_cast<int>(g.size());
  if (m2 > kMaxCrossProductInequalities) {
    throw GuardError("too many inequalities for cross products");
  }
  std::vector<std::vector<int>> masks;
  for (int k = 0; k <= m2; ++k) {
    std::vector<int> idx(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
    if (k == 0) {
      masks.push_back({});
      continue;
    }
    for (;;) {
      masks.push_back(idx);
      int i = k - 1;
      while (i >= 0 && idx[static_cast<std::size_t>(i)] == m2 - k + i) --i;
      if (i < 0) break;
      ++idx[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  std::vector<CrossProduct> out;
  for (auto& nu : masks) {
    Polynomial prod = Polynomial::constant(nvars, 1);
    for (int j : nu) prod = prod * g[static_cast<std::size_t>(j)];
    out.push_back({std::move(nu), std::move(prod)});
  }
  return out;
}

AugmentedSystem build_generators(const OptProblem& p, RelaxationVariant v) {
  const auto gv = generator_variant(v);
  if (!gv) return AugmentedSystem{};
  switch (*gv) {
    case GeneratorVariant::kMinimalEta: return phi_system(p);
    case GeneratorVariant::kAllMinors: return psi_system(p);
    case GeneratorVariant::kInactive: return inactive_system(p);
  }
  return AugmentedSystem{};
}

int minimal_order(const OptProblem& p, const AugmentedSystem& aug, RelaxationVariant v) {
  int n_min = std::max(1, half_degree_ceil(p.objective));
  for (const auto& h : p.equalities) n_min = std::max(n_min, half_degree_ceil(h));
  if (generator_variant(v)) {
    for (const auto& q : aug.generators) n_min = std::max(n_min, half_degree_ceil(q));
  }
  for (const auto& cp : psd_multipliers(p, v)) n_min = std::max(n_min, half_degree_ceil(cp.product));
  return n_min;
}

RelaxationSdp assemble(const OptProblem& p, const AugmentedSystem& aug, int order,
                       RelaxationVariant v, EqualityEncoding encoding) {
  const int n_min = minimal_order(p, aug, v);
  if (order < n_min) throw OrderTooSmall(order, n_min);

  RelaxationSdp sdp;
  sdp.variant = v;
  sdp.basis = MomentBasis(p.nvars, order);
  const MomentBasis& basis = sdp.basis;

  EqualityRow pin;
  pin.coeffs[0] = 1;
  pin.rhs = 1;
  sdp.equalities.push_back(std::move(pin));

  std::vector<const Polynomial*> ideal;
  for (const auto& h : p.equalities) ideal.push_back(&h);
  if (generator_variant(v)) {
    for (const auto& q : aug.generators) ideal.push_back(&q);
  }

  std::map<std::string, std::size_t> seen;
  for (const Polynomial* q : ideal) {
    if (q->is_zero()) continue;
    const int shift_degree = encoding == EqualityEncoding::kTruncatedIdeal
                                 ? 2 * order - q->degree()
                                 : 2 * (order - half_degree_ceil(*q));
    const int shifts = basis.prefix_size(shift_degree);
    for (int s = 0; s < shifts; ++s) {
      const Monomial& shift = basis.monomial(s);
      EqualityRow row;
      for (const auto& [m, c] : q->terms()) row.coeffs[basis.index(m * shift)] += c;
      std::erase_if(row.coeffs, [](const auto& kv) { return kv.second == 0; });
      if (row.coeffs.empty()) continue;
      const std::string key = row_key(row.coeffs);
      auto it = seen.find(key);
      if (it != seen.end()) {
        ++sdp.equalities[it->second].multiplicity;
        continue;
      }
      seen.emplace(key, sdp.equalities.size());
      row.rhs = 0;
      sdp.equalities.push_back(std::move(row));
    }
  }

  // Only the truncated ideal contains every product L(q g x^β x^α) that
  // the kernel argument needs.
  std::vector<Polynomial> generators;
  for (const Polynomial* q : ideal) {
    if (!q->is_zero()) generators.push_back(*q);
  }
  const bool reduce = encoding == EqualityEncoding::kTruncatedIdeal && !generators.empty();
  std::map<int, std::vector<int>> free_by_degree;
  for (const auto& cp : psd_multipliers(p, v)) {
    LmiBlock block = localizing_block(cp.product, order, basis);
    block.nu = cp.nu;
    block.label = nu_label(cp.nu);
    if (reduce) {
      auto it = free_by_degree.find(block.half_degree);
      if (it == free_by_degree.end()) {
        it = free_by_degree.emplace(block.half_degree, standard_rows(generators, basis, block.half_degree)).first;
      }
      block.free_rows = it->second;
    }
    sdp.blocks.push_back(std::move(block));
  }
  if (sdp.blocks.empty()) throw std::logic_error("relaxation has no PSD block");

  sdp.objective = objective_vector(p.objective, basis);
  return sdp;
}

std::vector<int> standard_rows(const std::vector<Polynomial>& ideal, const MomentBasis& basis, int d) {
  const int size = basis.prefix_size(d);
  // Echelon rows keyed by leading column; each row is reduced against the
  // existing pivots from the top column down.
  std::map<int, std::map<int, Rational>> pivots;
  for (const auto& q : ideal) {
    const int qd = q.degree();
    if (qd < 0 || qd > d) continue;
    const int shifts = basis.prefix_size(d - qd);
    for (int s = 0; s < shifts; ++s) {
      std::map<int, Rational> row;
      for (const auto& [m, c] : q.terms()) row[basis.index(m * basis.monomial(s))] += c;
      std::erase_if(row, [](const auto& kv) { return kv.second == 0; });
      while (!row.empty()) {
        const int lead = row.rbegin()->first;
        auto it = pivots.find(lead);
        if (it == pivots.end()) {
          pivots.emplace(lead, std::move(row));
          break;
        }
        const Rational f = row.rbegin()->second / it->second.rbegin()->second;
        for (const auto& [i, c] : it->second) row[i] -= f * c;
        std::erase_if(row, [](const auto& kv) { return kv.second == 0; });
      }
    }
  }
  std::vector<int> out;
  for (int i = 0; i < size; ++i) {
    if (!pivots.contains(i)) out.push_back(i);
  }
  return out;
}

LinearSdp to_linear(const RelaxationSdp& sdp, bool facial_reduction) {
  LinearSdp out;
  out.num_vars = sdp.basis.size();
  out.objective.assign(static_cast<std::size_t>(out.num_vars), 0.0);
  for (const auto& [i, c] : sdp.objective) out.objective[static_cast<std::size_t>(i)] = c.get_d();

  for (const auto& row : sdp.equalities) {
    Rational scale = 0;
    for (const auto& [i, c] : row.coeffs) scale = std::max(scale, Rational(abs(c)));
    std::vector<std::pair<int, double>> r;
    for (const auto& [i, c] : row.coeffs) r.emplace_back(i, Rational(c / scale).get_d());
    out.eq_rows.push_back(std::move(r));
    out.eq_rhs.push_back(Rational(row.rhs / scale).get_d());
  }

  for (const auto& b : sdp.blocks) {
    const bool reduce = facial_reduction && b.free_rows.has_value();
    if (reduce && b.free_rows->empty()) continue;
    std::vector<int> pos(static_cast<std::size_t>(b.size), -1);
    if (reduce) {
      const auto& rows = *b.free_rows;
      for (std::size_t k = 0; k < rows.size(); ++k) pos[static_cast<std::size_t>(rows[k])] = static_cast<int>(k);
    } else {
      for (int k = 0; k < b.size; ++k) pos[static_cast<std::size_t>(k)] = k;
    }
    SdpBlock blk;
    blk.size = reduce ? static_cast<int>(b.free_rows->size()) : b.size;
    for (const auto& [var, entries] : b.coeffs) {
      std::vector<SymEntry> e;
      for (const auto& re : entries) {
        const int r = pos[static_cast<std::size_t>(re.row)];
        const int c = pos[static_cast<std::size_t>(re.col)];
        if (re.value != 0 && r >= 0 && c >= 0) e.push_back({std::min(r, c), std::max(r, c), re.value.get_d()});
      }
      if (!e.empty()) blk.coeffs.emplace_back(var, std::move(e));
    }
    out.blocks.push_back(std::move(blk));
  }
  if (out.blocks.empty()) return to_linear(sdp, false);
  return out;
}

nlohmann::json structure_json(const RelaxationSdp& sdp) {
  nlohmann::json j;
  j["variant"] = to_string(sdp.variant);
  j["order"] = sdp.basis.order();
  j["num_moments"] = sdp.basis.size();
  j["num_equalities"] = sdp.equalities.size();
  int merged = 0;
  for (const auto& r : sdp.equalities) merged += r.multiplicity - 1;
  j["merged_duplicates"] = merged;
  auto& blocks = j["blocks"] = nlohmann::json::array();
  for (const auto& b : sdp.blocks) {
    blocks.push_back({{"label", b.label},
                      {"size", b.size},
                      {"half_degree", b.half_degree},
                      {"localized", to_string(b.localized)}});
  }
  return j;
}

nlohmann::json basis_json(const MomentBasis& basis, const std::vector<std::string>& names) {
  nlohmann::json j;
  j["nvars"] = basis.nvars();
  j["order"] = basis.order();
  j["variables"] = names;
  auto& mons = j["moments"] = nlohmann::json::array();
  for (int i = 0; i < basis.size(); ++i) {
    const Monomial& m = basis.monomial(i);
    mons.push_back({{"index", i + 1},
                    {"exponents", m.exponents()},
                    {"monomial", to_string(Polynomial::monomial(m), names)}});
  }
  return j;
}

}  // namespace jacsdp
