#include "jacsdp/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "jacsdp/sdpa.hpp"

namespace jacsdp {

bool solved(const SdpSolution& sol) {
  return sol.status == SdpStatus::kOptimal || sol.status == SdpStatus::kNearOptimal;
}

namespace {

// Same constraints; minimize the trace of the moment matrix among moment
// vectors whose objective value stays within `slack` of `bound`. Atoms of
// small norm win, which collapses positive-dimensional optimal faces onto a
// few points.
LinearSdp trace_problem(const LinearSdp& lin, const RelaxationSdp& sdp, double bound,
                        double slack) {
  LinearSdp out = lin;
  const MomentBasis& basis = sdp.basis;
  std::fill(out.objective.begin(), out.objective.end(), 0.0);
  const int half = basis.prefix_size(basis.order());
  for (int i = 0; i < half; ++i) {
    const Monomial& m = basis.monomial(i);
    out.objective[static_cast<std::size_t>(basis.index(m * m))] += 1.0;
  }
  SdpBlock cut;
  cut.size = 1;
  cut.constant.push_back({0, 0, -(bound + slack)});
  for (const auto& [i, c] : sdp.objective) {
    cut.coeffs.emplace_back(i, std::vector<SymEntry>{{0, 0, -c.get_d()}});
  }
  out.blocks.push_back(std::move(cut));
  return out;
}

// Flat-extension check followed by extraction and verification of the atoms.
// The moment vector may belong to a rescaled copy of the problem; extracted
// points are mapped back with `scale` before they are checked against `pf`.
CertificateReport certify_vector(std::span<const double> y, const RelaxationSdp& sdp,
                                 const ProblemFile& pf, double bound, const SolveOptions& opt,
                                 const std::vector<double>& scale) {
  CertificateReport cert = flat_extension_check(y, sdp, opt.rank_tol, opt.moment_only_fec);
  if (!cert.fec) {
    cert.extraction = "refused: flat-extension condition fails";
    return cert;
  }
  try {
    cert.points = extract_minimizers(y, sdp, opt.rank_tol, opt.moment_only_fec);
    for (auto& x : cert.points) {
      for (std::size_t i = 0; i < x.size(); ++i) x[i] *= scale[i];
    }
    std::sort(cert.points.begin(), cert.points.end());
    cert.extraction = "ok";
    for (const auto& x : cert.points) {
      cert.checks.push_back(verify_candidate(x, pf.problem, bound, opt.verify_tol));
    }
  } catch (const ExtractionFailed& e) {
    cert.extraction = std::string("failed: ") + e.what();
  }
  return cert;
}

bool conclusive(const CertificateReport& cert) {
  if (!cert.fec || cert.extraction != "ok") return false;
  return std::all_of(cert.checks.begin(), cert.checks.end(),
                     [](const PointCheck& c) { return c.certified; });
}

struct Attempt {
  RelaxationSdp sdp;
  LinearSdp lin;
  SdpSolution solution;
};

Attempt solve_relaxation(const OptProblem& p, int order, const SolveOptions& opt) {
  Attempt a;
  const AugmentedSystem aug = build_generators(p, opt.variant);
  a.sdp = assemble(p, aug, order, opt.variant, opt.encoding);
  a.lin = to_linear(a.sdp, opt.facial_reduction);
  a.solution = opt.external ? solve_external(a.lin, *opt.external) : solve(a.lin, opt.sdp);
  return a;
}

// Rounded magnitudes sqrt(y_{2e_i} / y_0) of the coordinates. Factors near
// one are left alone so that well scaled problems are not touched.
std::vector<Rational> suggest_scaling(const SdpSolution& sol, const MomentBasis& basis) {
  const int n = basis.nvars();
  std::vector<Rational> s(static_cast<std::size_t>(n), Rational(1));
  if (sol.y.empty() || basis.order() < 1) return s;
  const double y0 = sol.y[0] > 1e-12 ? sol.y[0] : 1.0;
  for (int i = 0; i < n; ++i) {
    const Monomial xi = Monomial::variable(n, i);
    const double m2 = sol.y[static_cast<std::size_t>(basis.index(xi * xi))];
    const double r = std::sqrt(std::max(m2, 0.0) / y0);
    if (!std::isfinite(r) || r == 0.0) continue;
    if (r >= 1.5) {
      s[static_cast<std::size_t>(i)] = Rational(static_cast<long>(std::min(std::round(r), 1024.0)));
    } else if (r <= 1.0 / 1.5) {
      s[static_cast<std::size_t>(i)] = Rational(1, static_cast<unsigned long>(std::min(std::round(1.0 / r), 1024.0)));
    }
  }
  return s;
}

OptProblem scale_problem(const OptProblem& p, std::span<const Rational> s) {
  std::vector<Polynomial> h;
  std::vector<Polynomial> g;
  for (const auto& q : p.equalities) h.push_back(scale_variables(q, s));
  for (const auto& q : p.inequalities) g.push_back(scale_variables(q, s));
  return OptProblem(scale_variables(p.objective, s), std::move(h), std::move(g));
}

// y_alpha of the original problem from the moments of the scaled one.
std::vector<double> unscale_moments(std::span<const double> y, const MomentBasis& basis,
                                    const std::vector<double>& scale) {
  std::vector<double> out(y.begin(), y.end());
  const int count = std::min<int>(basis.size(), static_cast<int>(out.size()));
  for (int k = 0; k < count; ++k) {
    const Monomial& m = basis.monomial(k);
    double f = 1.0;
    for (int i = 0; i < m.nvars(); ++i) f *= std::pow(scale[static_cast<std::size_t>(i)], m[i]);
    out[static_cast<std::size_t>(k)] *= f;
  }
  return out;
}

void certify(RunReport& rep, const Attempt& a, const ProblemFile& pf, const SolveOptions& opt) {
  rep.certificate = certify_vector(a.solution.y, a.sdp, pf, rep.bound, opt, rep.scaling);
  const bool first_ok = conclusive(*rep.certificate);
  // A single certified atom cannot be improved upon. Several atoms may come
  // from an interior-point solution spread over a flat optimal face, so the
  // lowest-rank conclusive certificate is preferred.
  if ((first_ok && rep.certificate->moment_rank <= 1) || !opt.low_rank_refinement || opt.external) {
    return;
  }
  const double slack = 1e-6 * std::max(1.0, std::abs(rep.bound));
  const SdpSolution ref = solve(trace_problem(a.lin, a.sdp, rep.bound, slack), opt.sdp);
  if (!solved(ref)) return;
  CertificateReport again = certify_vector(ref.y, a.sdp, pf, rep.bound, opt, rep.scaling);
  const bool better = first_ok ? conclusive(again) && again.moment_rank < rep.certificate->moment_rank
                               : conclusive(again) || (again.fec && !rep.certificate->fec);
  if (better) {
    rep.certificate = std::move(again);
    rep.refined = true;
  }
}

}  // namespace

RunReport run_solve(const ProblemFile& pf, const SolveOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  RunReport rep;
  rep.problem = pf.name;
  rep.variant = opt.variant;
  rep.known_optimum = pf.optimum;

  const AugmentedSystem aug = build_generators(pf.problem, opt.variant);
  rep.generators = static_cast<int>(aug.generators.size());
  rep.minimal_order = minimal_order(pf.problem, aug, opt.variant);
  rep.order = opt.order.value_or(rep.minimal_order);
  rep.scaling.assign(static_cast<std::size_t>(pf.problem.nvars), 1.0);

  Attempt a = solve_relaxation(pf.problem, rep.order, opt);
  if (opt.auto_scaling && !opt.external && !solved(a.solution)) {
    const std::vector<Rational> s = suggest_scaling(a.solution, a.sdp.basis);
    if (std::any_of(s.begin(), s.end(), [](const Rational& v) { return v != 1; })) {
      Attempt b = solve_relaxation(scale_problem(pf.problem, s), rep.order, opt);
      if (solved(b.solution)) {
        a = std::move(b);
        for (std::size_t i = 0; i < s.size(); ++i) rep.scaling[i] = s[i].get_d();
      }
    }
  }
  rep.moments = a.lin.num_vars;
  rep.equality_rows = static_cast<int>(a.lin.eq_rows.size());
  for (const auto& b : a.lin.blocks) rep.block_sizes.push_back(b.size);

  rep.solution = a.solution;
  rep.solution.y = unscale_moments(a.solution.y, a.sdp.basis, rep.scaling);
  rep.bound = rep.solution.primal_obj;
  if (opt.certify && solved(rep.solution) && rep.order >= 2 &&
      static_cast<int>(rep.solution.y.size()) == a.sdp.basis.size()) {
    rep.certified_run = true;
    certify(rep, a, pf, opt);
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

CompareTable run_compare(const ProblemFile& pf, const std::vector<RelaxationVariant>& variants,
                         const std::vector<int>& orders, const SolveOptions& base, int workers) {
  CompareTable table;
  table.problem = pf.name;
  table.variants = variants;
  table.orders = orders;
  for (auto v : variants) {
    for (int n : orders) table.cells.push_back({v, n, std::nullopt, {}});
  }
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < table.cells.size(); i = next++) {
      CompareCell& cell = table.cells[i];
      SolveOptions opt = base;
      opt.variant = cell.variant;
      opt.order = cell.order;
      try {
        cell.report = run_solve(pf, opt);
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(table.cells.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return table;
}

ExportBundle export_relaxation(const ProblemFile& pf, RelaxationVariant variant,
                               std::optional<int> order, EqualityEncoding encoding) {
  const AugmentedSystem aug = build_generators(pf.problem, variant);
  const int n = order.value_or(minimal_order(pf.problem, aug, variant));
  const RelaxationSdp sdp = assemble(pf.problem, aug, n, variant, encoding);
  ExportBundle out;
  out.sdpa = to_sdpa(to_linear(sdp), pf.name + " " + to_string(variant) + " order " + std::to_string(n));
  out.sidecar = basis_json(sdp.basis, pf.vars);
  out.sidecar["problem"] = pf.name;
  out.sidecar["structure"] = structure_json(sdp);
  return out;
}

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["problem"] = r.problem;
  j["variant"] = to_string(r.variant);
  j["order"] = r.order;
  j["minimal_order"] = r.minimal_order;
  j["generators"] = r.generators;
  j["moments"] = r.moments;
  j["equality_rows"] = r.equality_rows;
  j["block_sizes"] = r.block_sizes;
  j["bound"] = r.bound;
  j["primal"] = r.solution.primal_obj;
  j["dual"] = r.solution.dual_obj;
  j["solver"] = to_json(r.solution);
  j["known_optimum"] = r.known_optimum ? nlohmann::json(*r.known_optimum) : nlohmann::json(nullptr);
  j["scaling"] = r.scaling;
  j["refined"] = r.refined;
  j["certificate"] = r.certificate ? to_json(*r.certificate) : nlohmann::json(nullptr);
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

nlohmann::json to_json(const CompareTable& t) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["problem"] = t.problem;
  auto& cells = j["cells"] = nlohmann::json::array();
  for (const auto& c : t.cells) {
    nlohmann::json cj = {{"variant", to_string(c.variant)}, {"order", c.order}};
    if (c.report) {
      cj["status"] = to_string(c.report->solution.status);
      cj["bound"] = c.report->bound;
      cj["dual"] = c.report->solution.dual_obj;
      cj["fec"] = c.report->certificate ? nlohmann::json(c.report->certificate->fec) : nlohmann::json(nullptr);
      cj["wall_seconds"] = c.report->wall_seconds;
    } else {
      cj["status"] = "failed";
      cj["error"] = c.error;
    }
    cells.push_back(cj);
  }
  return j;
}

std::string to_markdown(const CompareTable& t) {
  std::ostringstream out;
  out << "Lower bounds for " << t.problem << "\n\n| variant |";
  for (int n : t.orders) out << " N = " << n << " |";
  out << "\n|---|";
  for (std::size_t i = 0; i < t.orders.size(); ++i) out << "---|";
  out << "\n";
  for (std::size_t v = 0; v < t.variants.size(); ++v) {
    out << "| " << to_string(t.variants[v]) << " |";
    for (std::size_t k = 0; k < t.orders.size(); ++k) {
      const CompareCell& c = t.cells[v * t.orders.size() + k];
      if (!c.report) {
        out << " failed |";
        continue;
      }
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.4e", c.report->bound);
      out << ' ' << buf;
      if (c.report->solution.status != SdpStatus::kOptimal) {
        out << " (" << to_string(c.report->solution.status) << ")";
      }
      if (c.report->certificate && c.report->certificate->fec) out << " *";
      out << " |";
    }
    out << "\n";
  }
  out << "\n`*` marks cells where the flat-extension condition holds.\n";
  return out.str();
}

}  // namespace jacsdp
