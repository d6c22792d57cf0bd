#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "jacsdp/polynomial.hpp"

namespace jacsdp {

/// minimize f(x) s.t. h_i(x) = 0, g_j(x) >= 0.
struct OptProblem {
  int nvars = 0;
  Polynomial objective;
  std::vector<Polynomial> equalities;
  std::vector<Polynomial> inequalities;

  OptProblem() = default;
  OptProblem(Polynomial f, std::vector<Polynomial> h, std::vector<Polynomial> g);

  int num_equalities() const { return static_cast<int>(equalities.size()); }
  int num_inequalities() const { return static_cast<int>(inequalities.size()); }
};

/// Raised when a construction guard fails (too many constraints, m1 > n, ...).
class GuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GeneratorVariant { kMinimalEta, kAllMinors, kInactive };

std::string to_string(GeneratorVariant v);

struct GeneratorInfo {
  std::vector<int> subset;  ///< J, 0-based inequality indices, ascending
  int index = 0;            ///< 1-based η index or minor index within J
};

/// Polynomials appended as equalities to the original problem.
struct AugmentedSystem {
  GeneratorVariant variant = GeneratorVariant::kMinimalEta;
  std::vector<Polynomial> generators;
  std::vector<GeneratorInfo> provenance;
};

/// min(m1 + m2, n - 1).
int m_bound(int m1, int m2, int n);

/// Jacobian [∇f ∇h ∇g_J] as an n x (1 + m1 + |J|) matrix.
PolyMatrix jacobian_columns(const OptProblem& p, const std::vector<int>& subset);

/// Rank of a k-minor [i1 < ... < ik] in the minor poset: the length of the
/// longest strictly descending chain ending at it. Indices are 1-based here
/// to match the usual notation; the closed form is Σ i_j - C(k+1, 2) + 1.
int minor_rank(const std::vector<int>& rows_one_based);

/// The nk - k^2 + 1 polynomials η_1..η_{nk-k^2+1} whose common zeros are the
/// n x k matrices of rank < k. η_ℓ sums the maximal minors of rank ℓ.
std::vector<Polynomial> eta_generators(const PolyMatrix& m);

/// Row sets (0-based) of the maximal minors that make up η_ℓ, ℓ = 1..nk-k^2+1.
std::vector<std::vector<std::vector<int>>> eta_row_sets(int n, int k);

/// Subsets J of the inequalities that carry generators, ordered by size then
/// lexicographically.
std::vector<std::vector<int>> admissible_subsets(const OptProblem& p);

/// φ_i^J = η_i(B^J) · Π_{j∉J} g_j over all admissible J.
AugmentedSystem phi_system(const OptProblem& p);
/// ψ_i^J = τ_i(B^J) · Π_{j∉J} g_j using every maximal minor τ_i of B^J.
AugmentedSystem psi_system(const OptProblem& p);
/// η_ℓ([∇f ∇h]); empty when m1 == n.
AugmentedSystem inactive_system(const OptProblem& p);

/// Closed-form generator counts.
long long phi_count(int n, int m1, int m2);
long long psi_count(int n, int m1, int m2);

nlohmann::json to_json(const AugmentedSystem& aug, const std::vector<std::string>& names);

}  // namespace jacsdp
