#pragma once

#include <utility>
#include <vector>

namespace jacsdp {

/// One stored entry of a symmetric matrix; row <= col.
struct SymEntry {
  int row = 0;
  int col = 0;
  double value = 0.0;
};

/// Block of  Σ_i y_i A_i - C  ⪰ 0. Diagonal blocks hold only diagonal entries.
struct SdpBlock {
  int size = 0;
  bool diagonal = false;
  std::vector<SymEntry> constant;
  /// (variable index, entries of A_i), ascending by variable.
  std::vector<std::pair<int, std::vector<SymEntry>>> coeffs;
};

/// Floating-point SDP in the moment form
///   minimize c^T y  s.t.  E y = e,  Σ_i y_i A_{b,i} - C_b ⪰ 0  for every block b.
struct LinearSdp {
  int num_vars = 0;
  std::vector<double> objective;
  std::vector<std::vector<std::pair<int, double>>> eq_rows;
  std::vector<double> eq_rhs;
  std::vector<SdpBlock> blocks;
};

}  // namespace jacsdp
