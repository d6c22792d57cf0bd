#pragma once

#include <string>
#include <vector>

#include "jacsdp/linear_sdp.hpp"
#include "jacsdp/relaxation.hpp"

namespace jacsdp {

/// SDPA sparse (.dat-s) text. Every PSD block is written as is; the equality
/// rows E y = e become one trailing diagonal block holding the pairs
/// (E y - e, e - E y), so a generic SDPA reader sees an ordinary problem.
/// Numbers use the shortest representation that round-trips to the same double.
std::string to_sdpa(const LinearSdp& sdp, const std::string& comment = "");
std::string to_sdpa(const RelaxationSdp& sdp);
void write_sdpa_file(const std::string& path, const LinearSdp& sdp, const std::string& comment = "");

/// Parses .dat-s text. Diagonal blocks whose entries come in exactly negated
/// consecutive pairs are folded back into equality rows.
LinearSdp read_sdpa(const std::string& text);

/// What an SDPA-family solver reports in its result file.
struct SdpaResult {
  std::string phase;
  bool phase_optimal = false;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  std::vector<double> x;
};

SdpaResult parse_sdpa_result(const std::string& text);
SdpaResult read_sdpa_result_file(const std::string& path);

}  // namespace jacsdp
