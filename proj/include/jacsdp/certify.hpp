#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "jacsdp/detvar.hpp"
#include "jacsdp/relaxation.hpp"

namespace jacsdp {

/// Number of eigenvalues above tau * max(1, largest eigenvalue).
int numerical_rank(const Eigen::MatrixXd& m, double tau = 1e-6);

struct RankPair {
  std::string label;
  int size = 0;
  int previous_size = 0;
  int rank = 0;
  int previous_rank = 0;
  /// Blocks of half degree 0 have no lower-order truncation.
  bool skipped = false;
};

struct PointCheck {
  std::vector<double> point;
  double max_equality_violation = 0.0;
  /// Smallest g_j(x); +infinity without inequalities.
  double min_inequality = 0.0;
  double objective = 0.0;
  /// f(x) - bound.
  double excess = 0.0;
  bool feasible = false;
  bool certified = false;
};

struct CertificateReport {
  /// Truncation order t at which the rank pairs were taken (t <= N).
  int order = 0;
  std::vector<RankPair> ranks;
  bool fec = false;
  /// Rank of the order-t moment matrix.
  int moment_rank = 0;
  std::string extraction;  ///< "ok", "refused", "failed: ..." or "not attempted"
  std::vector<std::vector<double>> points;
  std::vector<PointCheck> checks;
};

/// FEC refused: extraction requires equal ranks at consecutive orders.
class CertificationRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Complex or clustered eigenvalues after every retry.
class ExtractionFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rank pairs of every PSD block truncated to order t: the rank of L_q^(t)(y)
/// against the rank of its leading principal order-(t-1) submatrix. With
/// moment_only set, only the plain moment matrix is inspected.
CertificateReport rank_table(std::span<const double> y, const RelaxationSdp& sdp, int t,
                             double tau = 1e-6, bool moment_only = false);

/// Flat-extension check. Orders t = N, N-1, ... down to the largest half
/// degree among the multipliers are tried in turn and the first flat one is
/// reported; if none is flat the order-N table is returned with fec = false.
CertificateReport flat_extension_check(std::span<const double> y, const RelaxationSdp& sdp,
                                       double tau = 1e-6, bool moment_only = false);

/// Atoms of a flat moment matrix indexed by the first rows of `basis`.
/// `m` is the (C(n+d,d))-square moment matrix and `rank` its numerical rank.
std::vector<std::vector<double>> extract_atoms(const Eigen::MatrixXd& m, const MomentBasis& basis,
                                               int rank, double tau = 1e-6,
                                               unsigned seed = 20240601u);

/// Henrion-Lasserre extraction from the moment matrix at the flat order. Throws
/// CertificationRefused when the flat-extension check fails.
std::vector<std::vector<double>> extract_minimizers(std::span<const double> y,
                                                    const RelaxationSdp& sdp, double tau = 1e-6,
                                                    bool moment_only = false);

PointCheck verify_candidate(std::span<const double> x, const OptProblem& p, double bound,
                            double tol = 1e-3);

nlohmann::json to_json(const CertificateReport& report);

}  // namespace jacsdp
