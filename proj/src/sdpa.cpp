#include "jacsdp/sdpa.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace jacsdp {

namespace {

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Splits on whitespace and the punctuation SDPA allows between numbers.
std::vector<std::string> tokens(const std::string& line) {
  std::string cleaned = line;
  for (char& ch : cleaned) {
    if (ch == ',' || ch == '{' || ch == '}' || ch == '(' || ch == ')') ch = ' ';
  }
  std::istringstream ss(cleaned);
  std::vector<std::string> out;
  for (std::string t; ss >> t;) out.push_back(t);
  return out;
}

double to_double(const std::string& s) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("bad number in SDPA text: '" + s + "'");
  }
  return v;
}

int to_int(const std::string& s) {
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::runtime_error("bad integer in SDPA text: '" + s + "'");
  }
  return v;
}

}  // namespace

std::string to_sdpa(const LinearSdp& sdp, const std::string& comment) {
  const int m = sdp.num_vars;
  const bool has_eq = !sdp.eq_rows.empty();
  std::ostringstream out;
  out << "\"" << (comment.empty() ? "jacsdp" : comment) << "\n";
  out << m << "\n";
  out << sdp.blocks.size() + (has_eq ? 1 : 0) << "\n";
  for (std::size_t b = 0; b < sdp.blocks.size(); ++b) {
    if (b) out << ' ';
    out << (sdp.blocks[b].diagonal ? -sdp.blocks[b].size : sdp.blocks[b].size);
  }
  if (has_eq) out << (sdp.blocks.empty() ? "" : " ") << -2 * static_cast<int>(sdp.eq_rows.size());
  out << "\n";
  for (int i = 0; i < m; ++i) {
    if (i) out << ' ';
    out << fmt(i < static_cast<int>(sdp.objective.size()) ? sdp.objective[static_cast<std::size_t>(i)] : 0.0);
  }
  out << "\n";

  // Entries grouped by matrix number, then block, then position.
  struct Entry {
    int mat, block, row, col;
    double value;
  };
  std::vector<Entry> entries;
  for (std::size_t b = 0; b < sdp.blocks.size(); ++b) {
    const int bn = static_cast<int>(b) + 1;
    for (const auto& e : sdp.blocks[b].constant) {
      if (e.value != 0.0) entries.push_back({0, bn, e.row + 1, e.col + 1, e.value});
    }
    for (const auto& [var, list] : sdp.blocks[b].coeffs) {
      for (const auto& e : list) {
        if (e.value != 0.0) entries.push_back({var + 1, bn, e.row + 1, e.col + 1, e.value});
      }
    }
  }
  if (has_eq) {
    const int bn = static_cast<int>(sdp.blocks.size()) + 1;
    for (std::size_t r = 0; r < sdp.eq_rows.size(); ++r) {
      const int pos = 2 * static_cast<int>(r) + 1;
      const double rhs = sdp.eq_rhs[r];
      if (rhs != 0.0) {
        entries.push_back({0, bn, pos, pos, rhs});
        entries.push_back({0, bn, pos + 1, pos + 1, -rhs});
      }
      for (const auto& [var, v] : sdp.eq_rows[r]) {
        if (v == 0.0) continue;
        entries.push_back({var + 1, bn, pos, pos, v});
        entries.push_back({var + 1, bn, pos + 1, pos + 1, -v});
      }
    }
  }
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.mat != b.mat) return a.mat < b.mat;
    if (a.block != b.block) return a.block < b.block;
    if (a.row != b.row) return a.row < b.row;
    return a.col < b.col;
  });
  for (const auto& e : entries) {
    out << e.mat << ' ' << e.block << ' ' << e.row << ' ' << e.col << ' ' << fmt(e.value) << "\n";
  }
  return out.str();
}

std::string to_sdpa(const RelaxationSdp& sdp) {
  return to_sdpa(to_linear(sdp), "jacsdp " + to_string(sdp.variant) + " order " +
                                     std::to_string(sdp.basis.order()));
}

void write_sdpa_file(const std::string& path, const LinearSdp& sdp, const std::string& comment) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_sdpa(sdp, comment);
  if (!out) throw std::runtime_error("write failed for " + path);
}

LinearSdp read_sdpa(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> toks;
  for (std::string line; std::getline(in, line);) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '"' || line[first] == '*') continue;
    for (auto& t : tokens(line)) toks.push_back(std::move(t));
  }
  std::size_t pos = 0;
  auto next = [&]() -> const std::string& {
    if (pos >= toks.size()) throw std::runtime_error("truncated SDPA text");
    return toks[pos++];
  };
  LinearSdp raw;
  raw.num_vars = to_int(next());
  const int nblocks = to_int(next());
  if (raw.num_vars < 0 || nblocks <= 0) throw std::runtime_error("bad SDPA header");
  for (int b = 0; b < nblocks; ++b) {
    const int s = to_int(next());
    SdpBlock blk;
    blk.size = std::abs(s);
    blk.diagonal = s < 0;
    raw.blocks.push_back(blk);
  }
  for (int i = 0; i < raw.num_vars; ++i) raw.objective.push_back(to_double(next()));

  std::vector<std::map<int, std::vector<SymEntry>>> per_block(static_cast<std::size_t>(nblocks));
  while (pos < toks.size()) {
    const int mat = to_int(next());
    const int b = to_int(next());
    int r = to_int(next());
    int c = to_int(next());
    const double v = to_double(next());
    if (mat < 0 || mat > raw.num_vars || b < 1 || b > nblocks) {
      throw std::runtime_error("SDPA entry out of range");
    }
    auto& blk = raw.blocks[static_cast<std::size_t>(b - 1)];
    if (r > c) std::swap(r, c);
    if (r < 1 || c > blk.size) throw std::runtime_error("SDPA entry index out of range");
    if (blk.diagonal && r != c) throw std::runtime_error("off-diagonal entry in diagonal block");
    SymEntry e{r - 1, c - 1, v};
    if (mat == 0) {
      blk.constant.push_back(e);
    } else {
      per_block[static_cast<std::size_t>(b - 1)][mat - 1].push_back(e);
    }
  }
  for (int b = 0; b < nblocks; ++b) {
    for (auto& [var, list] : per_block[static_cast<std::size_t>(b)]) {
      raw.blocks[static_cast<std::size_t>(b)].coeffs.emplace_back(var, std::move(list));
    }
  }

  // Fold ± pair blocks back into equality rows.
  LinearSdp out;
  out.num_vars = raw.num_vars;
  out.objective = raw.objective;
  for (auto& blk : raw.blocks) {
    bool folds = blk.diagonal && blk.size % 2 == 0 && blk.size > 0;
    std::vector<std::map<int, double>> rows(static_cast<std::size_t>(blk.size));
    std::vector<double> rhs(static_cast<std::size_t>(blk.size), 0.0);
    if (folds) {
      for (const auto& e : blk.constant) rhs[static_cast<std::size_t>(e.row)] += e.value;
      for (const auto& [var, list] : blk.coeffs) {
        for (const auto& e : list) rows[static_cast<std::size_t>(e.row)][var] += e.value;
      }
      for (int r = 0; r + 1 < blk.size && folds; r += 2) {
        const auto& a = rows[static_cast<std::size_t>(r)];
        const auto& b = rows[static_cast<std::size_t>(r + 1)];
        if (a.size() != b.size() || rhs[static_cast<std::size_t>(r)] != -rhs[static_cast<std::size_t>(r + 1)]) {
          folds = false;
          break;
        }
        for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
          if (ia->first != ib->first || ia->second != -ib->second) {
            folds = false;
            break;
          }
        }
      }
    }
    if (!folds) {
      out.blocks.push_back(std::move(blk));
      continue;
    }
    for (int r = 0; r < blk.size; r += 2) {
      std::vector<std::pair<int, double>> row(rows[static_cast<std::size_t>(r)].begin(),
                                              rows[static_cast<std::size_t>(r)].end());
      out.eq_rows.push_back(std::move(row));
      out.eq_rhs.push_back(rhs[static_cast<std::size_t>(r)]);
    }
  }
  return out;
}

SdpaResult parse_sdpa_result(const std::string& text) {
  SdpaResult res;
  bool have_primal = false;
  bool have_dual = false;
  std::istringstream in(text);
  std::string line;
  auto value_after = [](const std::string& l) {
    const auto eq = l.find('=');
    return eq == std::string::npos ? std::string() : l.substr(eq + 1);
  };
  while (std::getline(in, line)) {
    if (line.rfind("phase.value", 0) == 0) {
      auto t = tokens(value_after(line));
      if (!t.empty()) res.phase = t.front();
      res.phase_optimal = res.phase == "pdOPT";
    } else if (line.rfind("objValPrimal", 0) == 0) {
      auto t = tokens(value_after(line));
      if (!t.empty()) res.primal_objective = to_double(t.front()), have_primal = true;
    } else if (line.rfind("objValDual", 0) == 0) {
      auto t = tokens(value_after(line));
      if (!t.empty()) res.dual_objective = to_double(t.front()), have_dual = true;
    } else if (line.rfind("xVec", 0) == 0) {
      std::string body = value_after(line);
      // The vector may start on the following line.
      while (body.find('}') == std::string::npos && std::getline(in, line)) body += " " + line;
      for (const auto& t : tokens(body)) res.x.push_back(to_double(t));
    }
  }
  if (!have_primal || !have_dual) throw std::runtime_error("SDPA result lacks objective values");
  return res;
}

SdpaResult read_sdpa_result_file(const std::string& path) { return parse_sdpa_result(read_file(path)); }

}  // namespace jacsdp
