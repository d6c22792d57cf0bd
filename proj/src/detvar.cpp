#include "jacsdp/detvar.hpp"

#include <algorithm>
#include <numeric>

namespace jacsdp {

OptProblem::OptProblem(Polynomial f, std::vector<Polynomial> h, std::vector<Polynomial> g)
    : nvars(f.nvars()), objective(std::move(f)), equalities(std::move(h)),
      inequalities(std::move(g)) {
  if (nvars < 1) throw std::invalid_argument("problem needs at least one variable");
  for (const auto& q : equalities) {
    if (q.nvars() != nvars) throw std::invalid_argument("equality variable-count mismatch");
  }
  for (const auto& q : inequalities) {
    if (q.nvars() != nvars) throw std::invalid_argument("inequality variable-count mismatch");
  }
}

std::string to_string(GeneratorVariant v) {
  switch (v) {
    case GeneratorVariant::kMinimalEta: return "minimal-eta";
    case GeneratorVariant::kAllMinors: return "all-minors";
    case GeneratorVariant::kInactive: return "inactive";
  }
  return "unknown";
}

int m_bound(int m1, int m2, int n) {
  if (n < 1) throw std::invalid_argument("m_bound: n must be positive");
  return std::min(m1 + m2, n - 1);
}

PolyMatrix jacobian_columns(const OptProblem& p, const std::vector<int>& subset) {
  const int cols = 1 + p.num_equalities() + static_cast<int>(subset.size());
  if (cols > p.nvars) throw GuardError("Jacobian has more columns than variables");
  std::vector<std::vector<Polynomial>> columns;
  columns.push_back(gradient(p.objective));
  for (const auto& h : p.equalities) columns.push_back(gradient(h));
  for (int j : subset) {
    if (j < 0 || j >= p.num_inequalities()) throw std::out_of_range("subset index out of range");
    columns.push_back(gradient(p.inequalities[static_cast<std::size_t>(j)]));
  }
  return PolyMatrix::from_columns(columns);
}

int minor_rank(const std::vector<int>& rows) {
  const int k = static_cast<int>(rows.size());
  if (k == 0) throw std::invalid_argument("minor_rank: empty index set");
  for (int i = 0; i < k; ++i) {
    if (rows[static_cast<std::size_t>(i)] < 1 ||
        (i > 0 && rows[static_cast<std::size_t>(i)] <= rows[static_cast<std::size_t>(i - 1)])) {
      throw std::invalid_argument("minor_rank: indices must be positive and strictly increasing");
    }
  }
  const int sum = std::accumulate(rows.begin(), rows.end(), 0);
  return sum - k * (k + 1) / 2 + 1;
}

namespace {

void for_each_subset(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
  if (k > n || k < 0) return;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    fn(idx);
    int i = k - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
}

Polynomial inactive_product(const OptProblem& p, const std::vector<int>& subset) {
  Polynomial prod = Polynomial::constant(p.nvars, 1);
  for (int j = 0; j < p.num_inequalities(); ++j) {
    if (std::find(subset.begin(), subset.end(), j) == subset.end()) {
      prod = prod * p.inequalities[static_cast<std::size_t>(j)];
    }
  }
  return prod;
}

void check_equality_count(const OptProblem& p) {
  if (p.num_equalities() > p.nvars) {
    throw GuardError("more equality constraints than variables (m1 > n); the construction needs m1 <= n");
  }
}

std::vector<int> all_columns(int k) {
  std::vector<int> c(static_cast<std::size_t>(k));
  std::iota(c.begin(), c.end(), 0);
  return c;
}

}  // namespace

std::vector<std::vector<std::vector<int>>> eta_row_sets(int n, int k) {
  if (k > n || k < 1) throw std::invalid_argument("eta_row_sets: need 1 <= k <= n");
  const int count = n * k - k * k + 1;
  std::vector<std::vector<std::vector<int>>> sets(static_cast<std::size_t>(count));
  for_each_subset(n, k, [&](const std::vector<int>& rows) {
    std::vector<int> one_based = rows;
    for (int& r : one_based) ++r;
    sets[static_cast<std::size_t>(minor_rank(one_based) - 1)].push_back(rows);
  });
  return sets;
}

std::vector<Polynomial> eta_generators(const PolyMatrix& m) {
  const int n = m.rows();
  const int k = m.cols();
  if (k > n) throw std::invalid_argument("eta_generators: more columns than rows");
  const auto cols = all_columns(k);
  std::vector<Polynomial> out;
  for (const auto& group : eta_row_sets(n, k)) {
    Polynomial eta(m.nvars());
    for (const auto& rows : group) eta += minor(m, rows, cols);
    out.push_back(std::move(eta));
  }
  return out;
}

std::vector<std::vector<int>> admissible_subsets(const OptProblem& p) {
  check_equality_count(p);
  const int m1 = p.num_equalities();
  const int m2 = p.num_inequalities();
  const int max_size = m_bound(m1, m2, p.nvars) - m1;
  std::vector<std::vector<int>> subsets;
  for (int k = 0; k <= max_size; ++k) {
    if (m1 + k + 1 > p.nvars) break;
    for_each_subset(m2, k, [&](const std::vector<int>& s) { subsets.push_back(s); });
  }
  return subsets;
}

AugmentedSystem phi_system(const OptProblem& p) {
  AugmentedSystem aug;
  aug.variant = GeneratorVariant::kMinimalEta;
  for (const auto& subset : admissible_subsets(p)) {
    const Polynomial prod = inactive_product(p, subset);
    const auto etas = eta_generators(jacobian_columns(p, subset));
    for (std::size_t i = 0; i < etas.size(); ++i) {
      aug.generators.push_back(etas[i] * prod);
      aug.provenance.push_back({subset, static_cast<int>(i) + 1});
    }
  }
  return aug;
}

AugmentedSystem psi_system(const OptProblem& p) {
  AugmentedSystem aug;
  aug.variant = GeneratorVariant::kAllMinors;
  for (const auto& subset : admissible_subsets(p)) {
    const Polynomial prod = inactive_product(p, subset);
    const PolyMatrix jac = jacobian_columns(p, subset);
    const auto cols = all_columns(jac.cols());
    int index = 0;
    for_each_subset(jac.rows(), jac.cols(), [&](const std::vector<int>& rows) {
      aug.generators.push_back(minor(jac, rows, cols) * prod);
      aug.provenance.push_back({subset, ++index});
    });
  }
  return aug;
}

AugmentedSystem inactive_system(const OptProblem& p) {
  check_equality_count(p);
  AugmentedSystem aug;
  aug.variant = GeneratorVariant::kInactive;
  if (p.num_equalities() == p.nvars) return aug;
  const auto etas = eta_generators(jacobian_columns(p, {}));
  for (std::size_t i = 0; i < etas.size(); ++i) {
    aug.generators.push_back(etas[i]);
    aug.provenance.push_back({{}, static_cast<int>(i) + 1});
  }
  return aug;
}

long long phi_count(int n, int m1, int m2) {
  if (m1 > n) throw GuardError("m1 > n");
  const int max_size = m_bound(m1, m2, n) - m1;
  long long total = 0;
  for (int k = 0; k <= max_size; ++k) {
    const int c = m1 + k + 1;
    if (c > n) break;
    total += binomial(m2, k) * (static_cast<long long>(n) * c - static_cast<long long>(c) * c + 1);
  }
  return total;
}

long long psi_count(int n, int m1, int m2) {
  if (m1 > n) throw GuardError("m1 > n");
  const int max_size = m_bound(m1, m2, n) - m1;
  long long total = 0;
  for (int k = 0; k <= max_size; ++k) {
    const int c = m1 + k + 1;
    if (c > n) break;
    total += binomial(m2, k) * binomial(n, c);
  }
  return total;
}

nlohmann::json to_json(const AugmentedSystem& aug, const std::vector<std::string>& names) {
  nlohmann::json j;
  j["variant"] = to_string(aug.variant);
  j["count"] = aug.generators.size();
  auto& gens = j["generators"] = nlohmann::json::array();
  for (std::size_t i = 0; i < aug.generators.size(); ++i) {
    std::vector<int> subset = aug.provenance[i].subset;
    for (int& s : subset) ++s;
    gens.push_back({{"subset", subset},
                    {"index", aug.provenance[i].index},
                    {"degree", aug.generators[i].degree()},
                    {"polynomial", to_string(aug.generators[i], names)}});
  }
  return j;
}

}  // namespace jacsdp
