// Command-line front end: solve, compare and export.
//
// Exit codes: 0 success, 2 parse error, 3 guard violation, 4 solver failure,
// 5 certification refused.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jacsdp/pipeline.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kParse = 2,
  kGuard = 3,
  kSolver = 4,
  kRefused = 5,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

jacsdp::RelaxationVariant variant_from(const std::string& name) {
  auto v = jacsdp::parse_variant(name);
  if (!v) throw UsageError("unknown variant '" + name + "'");
  return *v;
}

std::optional<int> order_from(const std::string& text) {
  if (text == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const int n = std::stoi(text, &used);
    if (used != text.size() || n < 1) throw UsageError("");
    return n;
  } catch (const std::exception&) {
    throw UsageError("order must be a positive integer or 'auto', got '" + text + "'");
  }
}

// "3..7", "3,5,6" or a single order.
std::vector<int> orders_from(const std::string& text) {
  std::vector<int> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const auto lo = order_from(text.substr(0, dots));
    const auto hi = order_from(text.substr(dots + 2));
    if (!lo || !hi || *lo > *hi) throw UsageError("bad order range '" + text + "'");
    for (int n = *lo; n <= *hi; ++n) out.push_back(n);
    return out;
  }
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    const auto n = order_from(item);
    if (!n) throw UsageError("'auto' is not allowed in an order list");
    out.push_back(*n);
  }
  if (out.empty()) throw UsageError("empty order list");
  return out;
}

std::vector<jacsdp::RelaxationVariant> variants_from(const std::string& text) {
  std::vector<jacsdp::RelaxationVariant> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) out.push_back(variant_from(item));
  if (out.empty()) throw UsageError("empty variant list");
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

struct Common {
  std::string file;
  double rank_tol = 1e-6;
  std::string solver = "internal";
  std::string solver_command;
  bool no_certify = false;
  bool moment_only = false;
  bool verbose = false;
  int max_iter = 200;
};

jacsdp::SolveOptions options_from(const Common& c) {
  jacsdp::SolveOptions opt;
  opt.rank_tol = c.rank_tol;
  opt.certify = !c.no_certify;
  opt.moment_only_fec = c.moment_only;
  opt.sdp.verbose = c.verbose;
  opt.sdp.max_iter = c.max_iter;
  if (c.solver == "external") {
    if (c.solver_command.empty()) {
      throw UsageError("--solver external needs --solver-command, e.g. \"csdp {input} {output}\"");
    }
    opt.external = jacsdp::ExternalSolverConfig{c.solver_command, "jacsdp_external"};
  } else if (c.solver != "internal") {
    throw UsageError("--solver must be 'internal' or 'external'");
  }
  return opt;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("file", c.file, "problem file (.prob)")->required();
  cmd->add_option("--rank-tol", c.rank_tol, "relative eigenvalue threshold for numerical rank");
  cmd->add_option("--solver", c.solver, "internal or external")->check(CLI::IsMember({"internal", "external"}));
  cmd->add_option("--solver-command", c.solver_command,
                  "external solver command template with {input} and {output}");
  cmd->add_flag("--no-certify", c.no_certify, "skip the flat-extension check and extraction");
  cmd->add_flag("--moment-only", c.moment_only, "check flatness on the moment matrix only");
  cmd->add_option("--max-iter", c.max_iter, "interior-point iteration limit");
  cmd->add_flag("-v,--verbose", c.verbose, "print solver iterations to stderr");
}

void print_summary(const jacsdp::RunReport& r) {
  std::fprintf(stderr, "%s %s N=%d: %s bound %.10g (dual %.10g) in %.2fs\n", r.problem.c_str(),
               jacsdp::to_string(r.variant).c_str(), r.order,
               jacsdp::to_string(r.solution.status).c_str(), r.bound, r.solution.dual_obj,
               r.wall_seconds);
  if (!r.certificate) return;
  std::fprintf(stderr, "  flat extension: %s (order %d, rank %d), extraction: %s\n",
               r.certificate->fec ? "yes" : "no", r.certificate->order, r.certificate->moment_rank,
               r.certificate->extraction.c_str());
  for (const auto& c : r.certificate->checks) {
    std::string pt;
    for (double v : c.point) pt += (pt.empty() ? "" : ", ") + std::to_string(v);
    std::fprintf(stderr, "  point (%s) f=%.8g %s\n", pt.c_str(), c.objective,
                 c.certified ? "certified" : (c.feasible ? "feasible" : "infeasible"));
  }
}

int run_solve_cmd(const Common& c, const std::string& variant, const std::string& order,
                  const std::string& out) {
  const jacsdp::ProblemFile pf = jacsdp::load_problem_file(c.file);
  jacsdp::SolveOptions opt = options_from(c);
  opt.variant = variant_from(variant);
  opt.order = order_from(order);
  const jacsdp::RunReport r = jacsdp::run_solve(pf, opt);
  write_text(out, to_json(r).dump(2) + "\n");
  print_summary(r);
  if (!jacsdp::solved(r.solution)) return kSolver;
  if (opt.certify && (!r.certificate || !r.certificate->fec)) return kRefused;
  return kOk;
}

int run_compare_cmd(const Common& c, const std::string& variants, const std::string& orders,
                    const std::string& out, const std::string& markdown, int workers) {
  const jacsdp::ProblemFile pf = jacsdp::load_problem_file(c.file);
  const jacsdp::SolveOptions opt = options_from(c);
  const jacsdp::CompareTable t =
      jacsdp::run_compare(pf, variants_from(variants), orders_from(orders), opt, workers);
  write_text(out, to_json(t).dump(2) + "\n");
  if (!markdown.empty()) write_text(markdown, jacsdp::to_markdown(t));
  else std::cerr << jacsdp::to_markdown(t);
  return kOk;
}

int run_export_cmd(const std::string& file, const std::string& variant, const std::string& order,
                   const std::string& out) {
  const jacsdp::ProblemFile pf = jacsdp::load_problem_file(file);
  const jacsdp::ExportBundle b = jacsdp::export_relaxation(pf, variant_from(variant), order_from(order));
  if (out.empty() || out == "-") {
    std::cout << b.sdpa;
    return kOk;
  }
  write_text(out, b.sdpa);
  write_text(out + ".json", b.sidecar.dump(2) + "\n");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Jacobian SDP relaxations for polynomial optimization"};
  app.require_subcommand(1);

  Common common;
  std::string variant = "jacobian-schmudgen";
  std::string order = "auto";
  std::string out;

  auto* solve = app.add_subcommand("solve", "solve one relaxation and certify it");
  add_common(solve, common);
  solve->add_option("--variant", variant, "relaxation variant");
  solve->add_option("--order", order, "relaxation order N or 'auto'");
  solve->add_option("--out", out, "JSON report path ('-' for stdout)");

  std::string variants = "baseline-putinar,jacobian-schmudgen";
  std::string orders;
  std::string markdown;
  int workers = 1;
  auto* compare = app.add_subcommand("compare", "bound table over variants and orders");
  add_common(compare, common);
  compare->add_option("--variants", variants, "comma-separated variants");
  compare->add_option("--orders", orders, "orders as N1..N2 or a comma list")->required();
  compare->add_option("--out", out, "JSON table path ('-' for stdout)");
  compare->add_option("--markdown", markdown, "markdown table path");
  compare->add_option("--workers", workers, "concurrent solves")->check(CLI::PositiveNumber);

  std::string export_file;
  auto* exp = app.add_subcommand("export", "write the relaxation in SDPA sparse format");
  exp->add_option("file", export_file, "problem file (.prob)")->required();
  exp->add_option("--variant", variant, "relaxation variant");
  exp->add_option("--order", order, "relaxation order N or 'auto'");
  exp->add_option("--out", out, "output .dat-s path; the moment map goes to <out>.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kParse;
  }

  try {
    if (*solve) return run_solve_cmd(common, variant, order, out);
    if (*compare) return run_compare_cmd(common, variants, orders, out, markdown, workers);
    return run_export_cmd(export_file, variant, order, out);
  } catch (const jacsdp::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kParse;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kParse;
  } catch (const jacsdp::GuardError& e) {
    std::cerr << "guard violation: " << e.what() << "\n";
    return kGuard;
  } catch (const jacsdp::OrderTooSmall& e) {
    std::cerr << "guard violation: " << e.what() << "\n";
    return kGuard;
  } catch (const jacsdp::CertificationRefused& e) {
    std::cerr << "certification refused: " << e.what() << "\n";
    return kRefused;
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kSolver;
  }
}
