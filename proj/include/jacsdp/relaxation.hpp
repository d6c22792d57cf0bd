#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "jacsdp/detvar.hpp"
#include "jacsdp/linear_sdp.hpp"
#include "jacsdp/polynomial.hpp"

namespace jacsdp {

/// Moment coordinates y_α for |α| <= 2N in GradedOrder; y_0 sits at index 0.
class MomentBasis {
 public:
  MomentBasis() = default;
  MomentBasis(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(monomials_.size()); }
  const std::vector<Monomial>& monomials() const { return monomials_; }
  const Monomial& monomial(int i) const { return monomials_[static_cast<std::size_t>(i)]; }
  /// Position of a monomial; throws std::out_of_range if its degree exceeds 2N.
  int index(const Monomial& m) const;
  /// Number of monomials of degree <= d, i.e. C(n+d, d).
  int prefix_size(int d) const;

 private:
  int nvars_ = 0;
  int order_ = 0;
  std::vector<Monomial> monomials_;
  std::unordered_map<Monomial, int, MonomialHash> index_;
};

struct RationalEntry {
  int row = 0;
  int col = 0;
  Rational value;
};

/// Localizing matrix L_q^{(N)}(y) = Σ_α A_α y_α, with size C(n+d, d) where
/// d = N - ceil(deg q / 2).
struct LmiBlock {
  int size = 0;
  int half_degree = 0;  ///< d
  std::string label;
  std::vector<int> nu;  ///< indices of the inequalities multiplied together
  Polynomial localized;
  /// variable index -> upper-triangle entries of A_α
  std::map<int, std::vector<RationalEntry>> coeffs;
  /// Rows that survive facial reduction, ascending. The equality rows force
  /// L_q(y) v = 0 for the coefficient vector v of every multiple of an ideal
  /// generator of degree <= d, so the block is PSD iff its principal
  /// submatrix on these rows is. Unset when no reduction applies; an empty
  /// list means the block vanishes identically.
  std::optional<std::vector<int>> free_rows;
};

struct EqualityRow {
  std::map<int, Rational> coeffs;
  Rational rhs;
  int multiplicity = 1;
};

enum class RelaxationVariant {
  kJacobianSchmudgen,
  kJacobianAllMinors,
  kJacobianPutinar,
  kInactivePutinar,
  kInactiveSchmudgen,
  kBaselinePutinar,
  kBaselineSchmudgen,
};

std::string to_string(RelaxationVariant v);
std::optional<RelaxationVariant> parse_variant(const std::string& name);
std::vector<RelaxationVariant> all_variants();
/// Which generator system a variant consumes; nullopt for the baselines.
std::optional<GeneratorVariant> generator_variant(RelaxationVariant v);
/// True when the PSD blocks range over all products g_ν.
bool uses_cross_products(RelaxationVariant v);

struct RelaxationSdp {
  RelaxationVariant variant = RelaxationVariant::kJacobianSchmudgen;
  MomentBasis basis;
  std::map<int, Rational> objective;
  /// Row 0 pins y_0 = 1; the rest are homogeneous.
  std::vector<EqualityRow> equalities;
  std::vector<LmiBlock> blocks;
};

class OrderTooSmall : public std::runtime_error {
 public:
  OrderTooSmall(int requested, int minimal)
      : std::runtime_error("relaxation order " + std::to_string(requested) +
                           " is too small; minimal admissible order is " +
                           std::to_string(minimal)),
        minimal_(minimal) {}
  int minimal_order() const { return minimal_; }

 private:
  int minimal_;
};

/// Maximum number of inequalities for which all 2^m2 products are formed.
inline constexpr int kMaxCrossProductInequalities = 12;

LmiBlock localizing_block(const Polynomial& q, int order, const MomentBasis& basis);
std::map<int, Rational> objective_vector(const Polynomial& f, const MomentBasis& basis);

struct CrossProduct {
  std::vector<int> nu;
  Polynomial product;
};
/// All products g_ν, ν ∈ {0,1}^m2, by popcount then lexicographically; g_∅ = 1.
std::vector<CrossProduct> cross_products(const std::vector<Polynomial>& g, int nvars);

/// Generator system required by a variant (empty for baselines).
AugmentedSystem build_generators(const OptProblem& p, RelaxationVariant v);

/// Smallest N with every involved degree <= 2N.
int minimal_order(const OptProblem& p, const AugmentedSystem& aug, RelaxationVariant v);

/// How an equality q = 0 becomes scalar rows L(q * x^γ) = 0.
enum class EqualityEncoding {
  /// |γ| <= 2N - deg q: every multiple of q of degree <= 2N, as in the truncated
  /// ideal of the SOS side. This is the default.
  kTruncatedIdeal,
  /// |γ| <= 2d with d = N - ceil(deg q / 2): the distinct entries of the
  /// localizing matrix of q. Weaker when deg q is odd.
  kLocalizingEntries,
};

RelaxationSdp assemble(const OptProblem& p, const AugmentedSystem& aug, int order,
                       RelaxationVariant v,
                       EqualityEncoding encoding = EqualityEncoding::kTruncatedIdeal);

/// Monomials of degree <= d outside the leading monomials of the span of
/// {q x^α : deg(q x^α) <= d}; the leading monomial is the last one in
/// GradedOrder. Returned as basis indices, ascending.
std::vector<int> standard_rows(const std::vector<Polynomial>& ideal, const MomentBasis& basis, int d);

/// Floating-point form with equality rows scaled to unit infinity norm. With
/// `facial_reduction`, each block keeps only its `free_rows` and blocks with
/// no free row are dropped (unless that would drop every block).
LinearSdp to_linear(const RelaxationSdp& sdp, bool facial_reduction = false);

nlohmann::json structure_json(const RelaxationSdp& sdp);
/// Moment index -> monomial map written next to SDPA exports.
nlohmann::json basis_json(const MomentBasis& basis, const std::vector<std::string>& names);

}  // namespace jacsdp
