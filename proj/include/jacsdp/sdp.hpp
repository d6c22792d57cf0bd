#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "jacsdp/linear_sdp.hpp"
#include "jacsdp/relaxation.hpp"

namespace jacsdp {

struct SdpOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  int max_iter = 200;
  /// Pivot threshold of the QR that removes dependent equality rows.
  double rank_threshold = 1e-10;
  bool verbose = false;
};

enum class SdpStatus { kOptimal, kNearOptimal, kInfeasible, kUnbounded, kMaxIter };

std::string to_string(SdpStatus s);

struct SdpSolution {
  SdpStatus status = SdpStatus::kMaxIter;
  /// Moment vector.
  std::vector<double> y;
  /// Moment-side value c^T y (upper side of the duality pair).
  double primal_obj = 0.0;
  /// Certificate-side value (lower side of the duality pair).
  double dual_obj = 0.0;
  int iterations = 0;
  /// Relative duality gap |primal - dual| / (1 + |primal| + |dual|).
  double gap = 0.0;
  /// Distance between the block values F(y) and the PSD slack S, relative
  /// to 1 + ||C|| + ||F(y)||.
  double primal_infeasibility = 0.0;
  /// Relative residual of the multiplier (Gram matrix) equations.
  double dual_infeasibility = 0.0;
  double equality_residual = 0.0;
  int equality_rank = 0;
  /// Gram matrices of the certificate side, one per block.
  std::vector<Eigen::MatrixXd> gram;
  std::string message;
};

/// Primal-dual interior-point method with Nesterov-Todd scaling and
/// Mehrotra predictor-corrector steps. Equalities are handled by restricting
/// the Newton step to their null space.
SdpSolution solve(const LinearSdp& sdp, const SdpOptions& options = {});

/// Σ_i y_i A_i - C for one block.
Eigen::MatrixXd block_value(const SdpBlock& block, std::span<const double> y);
/// Σ_α A_α y_α for a localizing block.
Eigen::MatrixXd moment_matrix_values(std::span<const double> y, const LmiBlock& block);

/// Runs a user-supplied SDPA-format solver. The command template may contain
/// {input} and {output}; the solver must write SDPA-style "objValPrimal",
/// "objValDual" and "xVec" lines.
struct ExternalSolverConfig {
  std::string command_template;
  std::string work_prefix = "jacsdp_external";
};
SdpSolution solve_external(const LinearSdp& sdp, const ExternalSolverConfig& config);

nlohmann::json to_json(const SdpSolution& sol);

}  // namespace jacsdp
