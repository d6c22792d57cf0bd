#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "jacsdp/certify.hpp"
#include "jacsdp/problem_file.hpp"
#include "jacsdp/relaxation.hpp"
#include "jacsdp/sdp.hpp"

namespace jacsdp {

inline constexpr int kReportSchemaVersion = 1;

struct SolveOptions {
  RelaxationVariant variant = RelaxationVariant::kJacobianSchmudgen;
  /// Relaxation order; the minimal admissible one when empty.
  std::optional<int> order;
  EqualityEncoding encoding = EqualityEncoding::kTruncatedIdeal;
  SdpOptions sdp;
  /// Uses an SDPA-format solver instead of the internal one when set.
  std::optional<ExternalSolverConfig> external;
  bool certify = true;
  double rank_tol = 1e-6;
  bool moment_only_fec = false;
  /// When the first solution is not flat, re-solve for a minimum-trace
  /// moment vector among the (near) optimal ones and certify that instead.
  bool low_rank_refinement = true;
  /// When the first solve does not converge, substitute x_i = s_i * x_i with
  /// rounded magnitudes s_i read off its moments and solve again.
  bool auto_scaling = true;
  /// Solve with the rows forced into each block's kernel by the equalities
  /// removed (see LmiBlock::free_rows).
  bool facial_reduction = true;
  /// Tolerance of verify_candidate for extracted points.
  double verify_tol = 1e-3;
};

struct RunReport {
  std::string problem;
  RelaxationVariant variant = RelaxationVariant::kJacobianSchmudgen;
  int order = 0;
  int minimal_order = 0;
  int generators = 0;
  int moments = 0;
  int equality_rows = 0;
  std::vector<int> block_sizes;
  SdpSolution solution;
  /// Lower bound reported for the problem: the moment-side optimal value.
  double bound = 0.0;
  /// Variable scale factors of the solved relaxation (all ones when the
  /// problem was solved as given). The moment vector in `solution` is
  /// mapped back to the original variables; the Gram matrices are not.
  std::vector<double> scaling;
  bool certified_run = false;
  bool refined = false;
  std::optional<CertificateReport> certificate;
  std::optional<double> known_optimum;
  double wall_seconds = 0.0;
};

/// Solver outcome usable as a bound.
bool solved(const SdpSolution& sol);

RunReport run_solve(const ProblemFile& pf, const SolveOptions& options);

struct CompareCell {
  RelaxationVariant variant = RelaxationVariant::kBaselinePutinar;
  int order = 0;
  std::optional<RunReport> report;
  std::string error;
};

struct CompareTable {
  std::string problem;
  std::vector<RelaxationVariant> variants;
  std::vector<int> orders;
  /// Row-major: variant index * orders.size() + order index.
  std::vector<CompareCell> cells;
};

/// Runs every (variant, order) cell with at most `workers` concurrent solves.
/// Failures are recorded per cell. Results are ordered by cell index whatever
/// the completion order.
CompareTable run_compare(const ProblemFile& pf, const std::vector<RelaxationVariant>& variants,
                         const std::vector<int>& orders, const SolveOptions& base, int workers);

struct ExportBundle {
  std::string sdpa;
  nlohmann::json sidecar;
};

ExportBundle export_relaxation(const ProblemFile& pf, RelaxationVariant variant,
                               std::optional<int> order,
                               EqualityEncoding encoding = EqualityEncoding::kTruncatedIdeal);

nlohmann::json to_json(const RunReport& report);
nlohmann::json to_json(const CompareTable& table);
std::string to_markdown(const CompareTable& table);

}  // namespace jacsdp
