// Acceptance run: prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jacsdp/certify.hpp"
#include "jacsdp/detvar.hpp"
#include "jacsdp/pipeline.hpp"

namespace {

using namespace jacsdp;
using Points = std::vector<std::vector<double>>;

int g_failures = 0;

void report(const std::string& id, bool ok, const std::string& detail) {
  std::printf("%s %s: %s\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ProblemFile corpus(const std::string& name) {
  return load_problem_file(std::string(JACSDP_PROBLEM_DIR) + "/" + name + ".prob");
}

double distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

std::string points_text(const Points& pts) {
  std::string s = "[";
  for (const auto& p : pts) {
    s += s.size() > 1 ? ", (" : "(";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + fmt("%.4f", p[i]);
    s += ")";
  }
  return s + "]";
}

struct CorpusRun {
  std::string name;
  RunReport report;
};

RunReport solve_at(const ProblemFile& pf, RelaxationVariant v, int order, bool certify = true) {
  SolveOptions opt;
  opt.variant = v;
  opt.order = order;
  opt.certify = certify;
  return run_solve(pf, opt);
}

// Criterion 1: one line per worked example.
std::vector<CorpusRun> worked_examples() {
  struct Example {
    std::string id;
    std::string file;
    double target;
    double tol;
    std::optional<std::vector<double>> minimizer;
  };
  const std::vector<Example> examples = {
      {"1.sextic", "unconstrained_sextic", 0.0, 1e-6, std::vector<double>{0, 0, 0}},
      {"1.robinson", "robinson_eq", 0.0, 1e-6, std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}},
      {"1.motzkin_ball", "motzkin_ball", 0.0, 1e-6, std::vector<double>{0, 0, 0}},
      {"1.motzkin_exterior", "motzkin_exterior", 0.0, 1e-6, std::nullopt},
      {"1.box", "box_form", 0.0, 1e-6, std::vector<double>{0, 0, 0}},
  };
  std::vector<CorpusRun> runs;
  for (const auto& ex : examples) {
    const ProblemFile pf = corpus(ex.file);
    const RunReport r = solve_at(pf, RelaxationVariant::kJacobianSchmudgen, *pf.order);
    bool ok = solved(r.solution) && std::abs(r.bound - ex.target) <= ex.tol && r.wall_seconds < 30.0;
    std::string detail = "N=" + std::to_string(r.order) + " status " + to_string(r.solution.status) +
                         " bound " + fmt("%.4e", r.bound) + " time " + fmt("%.2fs", r.wall_seconds);
    if (ex.minimizer) {
      const Points pts = r.certificate ? r.certificate->points : Points{};
      bool near = !pts.empty();
      for (const auto& p : pts) near = near && distance(p, *ex.minimizer) <= 1e-3;
      ok = ok && near;
      detail += " minimizers " + points_text(pts);
    }
    report(ex.id, ok, detail);
    runs.push_back({ex.file, r});
  }

  const ProblemFile pf = corpus("m5_quadratic");
  const RunReport r = solve_at(pf, RelaxationVariant::kJacobianSchmudgen, 4);
  const double target = 2.0 + 0.5 * 5.0 * (5.0 + std::sqrt(29.0));
  const Points pts = r.certificate ? r.certificate->points : Points{};
  bool matched = pts.size() == 4;
  for (double s1 : {-1.0, 1.0}) {
    for (double s2 : {-1.0, 1.0}) {
      const std::vector<double> want = {s1 * 5.1926, s2 * 1.0};
      bool hit = false;
      for (const auto& p : pts) hit = hit || distance(p, want) <= 1e-3;
      matched = matched && hit;
    }
  }
  const bool fec = r.certificate && r.certificate->fec;
  report("1.m5", solved(r.solution) && std::abs(r.bound - target) <= 1e-3 && matched && fec && r.wall_seconds < 30.0,
         "N=4 status " + to_string(r.solution.status) + " bound " + fmt("%.6f", r.bound) + " (target " +
             fmt("%.6f", target) + ") FEC " + (fec ? "true" : "false") + " points " + points_text(pts) + " time " +
             fmt("%.2fs", r.wall_seconds));
  runs.push_back({"m5_quadratic", r});
  return runs;
}

// Criterion 2: baseline contrast.
void baseline_contrast() {
  const ProblemFile rob = corpus("robinson_eq");
  const std::map<int, double> published = {
      {3, -0.0582}, {4, -0.0479}, {5, -0.0194}, {6, -0.0053}, {7, -4.8358e-5}};
  for (const auto& [n, want] : published) {
    const RunReport r = solve_at(rob, RelaxationVariant::kBaselinePutinar, n, false);
    const double rel = std::abs(r.bound - want) / std::abs(want);
    report("2.robinson_baseline.N=" + std::to_string(n), rel <= 1e-2,
           "bound " + fmt("%.4e", r.bound) + " status " + to_string(r.solution.status) + " expected " +
               fmt("%.4e", want) + " relative error " + fmt("%.2e", rel));
  }

  const ProblemFile m5 = corpus("m5_quadratic");
  bool below = true;
  std::string detail;
  for (int n = 1; n <= 6; ++n) {
    const RunReport r = solve_at(m5, RelaxationVariant::kBaselinePutinar, n, false);
    below = below && r.bound <= 2.0 + 1e-3;
    detail += (detail.empty() ? "" : ", ") + ("N=" + std::to_string(n) + " " + fmt("%.6f", r.bound) + " (" +
                                             to_string(r.solution.status) + ")");
  }
  report("2.m5_baseline_at_most_2", below, detail);
}

// Criterion 3: property suites in compact form.
void eta_oracle() {
  std::mt19937 rng(2024);
  std::normal_distribution<double> gauss;
  int checked = 0;
  bool ok = true;
  for (int n = 1; n <= 6; ++n) {
    for (int k = 1; k <= std::min(4, n); ++k) {
      const auto sets = eta_row_sets(n, k);
      for (int trial = 0; trial < 200; ++trial) {
        const bool deficient = trial % 2 == 1;
        Eigen::MatrixXd a(n, k);
        for (int i = 0; i < n; ++i) {
          for (int j = 0; j < k; ++j) a(i, j) = gauss(rng);
        }
        if (deficient) {
          a.col(k - 1).setZero();
          for (int j = 0; j + 1 < k; ++j) a.col(k - 1) += gauss(rng) * a.col(j);
        }
        double norm = 1.0;
        for (int c = 0; c < k; ++c) norm *= std::max(1e-300, a.col(c).norm());
        bool minors_vanish = true;
        bool eta_vanish = true;
        for (const auto& level : sets) {
          double sum = 0.0;
          for (const auto& rows : level) {
            Eigen::MatrixXd sub(k, k);
            for (int i = 0; i < k; ++i) sub.row(i) = a.row(rows[static_cast<std::size_t>(i)]);
            const double d = sub.determinant() / norm;
            minors_vanish = minors_vanish && std::abs(d) <= 1e-8;
            sum += d;
          }
          eta_vanish = eta_vanish && std::abs(sum) <= 1e-8;
        }
        ok = ok && eta_vanish == minors_vanish && minors_vanish == deficient;
        ++checked;
      }
    }
  }
  report("3.eta_oracle", ok, std::to_string(checked) + " random matrices, n <= 6, k <= 4");
}

void minor_rank_brute_force() {
  bool ok = true;
  int checked = 0;
  for (int n = 1; n <= 8; ++n) {
    for (int k = 1; k <= std::min(4, n); ++k) {
      std::vector<std::vector<int>> all;
      std::vector<int> idx(static_cast<std::size_t>(k));
      std::iota(idx.begin(), idx.end(), 1);
      for (;;) {
        all.push_back(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + i + 1) --i;
        if (i < 0) break;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      }
      std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        return std::accumulate(a.begin(), a.end(), 0) < std::accumulate(b.begin(), b.end(), 0);
      });
      std::map<std::vector<int>, int> chain;
      for (const auto& s : all) {
        int best = 0;
        for (const auto& [t, len] : chain) {
          bool below = t != s;
          for (int j = 0; j < k && below; ++j) below = t[static_cast<std::size_t>(j)] <= s[static_cast<std::size_t>(j)];
          if (below) best = std::max(best, len);
        }
        chain[s] = best + 1;
        ok = ok && minor_rank(s) == best + 1;
        ++checked;
      }
    }
  }
  report("3.minor_rank", ok, std::to_string(checked) + " index sets, n <= 8, k <= 4");
}

Polynomial random_poly(std::mt19937& rng, int n, int degree) {
  std::uniform_int_distribution<int> coef(-3, 3), deg(0, degree), var(0, n - 1);
  Polynomial p(n);
  for (int t = 0; t < 3; ++t) {
    std::vector<int> e(static_cast<std::size_t>(n), 0);
    const int d = deg(rng);
    for (int i = 0; i < d; ++i) ++e[static_cast<std::size_t>(var(rng))];
    p += Polynomial::monomial(Monomial(e), coef(rng));
  }
  return p;
}

void generator_counts() {
  std::mt19937 rng(99);
  std::uniform_int_distribution<int> nd(1, 5), md(0, 3);
  bool ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = nd(rng);
    const int m1 = std::min(md(rng), n);
    const int m2 = md(rng);
    std::vector<Polynomial> h, g;
    for (int i = 0; i < m1; ++i) h.push_back(random_poly(rng, n, 2));
    for (int i = 0; i < m2; ++i) g.push_back(random_poly(rng, n, 2));
    const OptProblem p(random_poly(rng, n, 3), h, g);
    long long expected = 0;
    for (const auto& j : admissible_subsets(p)) {
      const long long c = m1 + static_cast<long long>(j.size()) + 1;
      expected += n * c - c * c + 1;
    }
    ok = ok && static_cast<long long>(phi_system(p).generators.size()) == expected &&
         phi_count(n, m1, m2) == expected;
  }
  bool single = true;
  for (int n = 2; n <= 6; ++n) {
    const OptProblem p(random_poly(rng, n, 3), {}, {random_poly(rng, n, 2)});
    single = single && static_cast<int>(phi_system(p).generators.size()) == 3 * (n - 1);
  }
  report("3.generator_counts", ok && single, "50 random shapes; single inequality gives 3(n-1) for n = 2..6");
}

void point_mass_feasibility() {
  struct Case {
    std::string file;
    std::vector<double> u;
  };
  const double a = (5.0 + std::sqrt(29.0)) / 2.0;
  const std::vector<Case> cases = {{"m5_quadratic", {a, 1.0}},      {"m5_quadratic", {-a, -1.0}},
                                   {"robinson_eq", {1.0 / 3, 1.0 / 3, 1.0 / 3}},
                                   {"motzkin_ball", {0, 0, 0}},     {"motzkin_exterior", {1, 1, 1}},
                                   {"unconstrained_sextic", {0, 0, 0}}, {"box_form", {0, 0, 0}}};
  double worst = 0.0;
  for (const auto& c : cases) {
    const ProblemFile pf = corpus(c.file);
    for (auto v : {RelaxationVariant::kJacobianSchmudgen, RelaxationVariant::kJacobianAllMinors,
                   RelaxationVariant::kJacobianPutinar}) {
      const AugmentedSystem aug = build_generators(pf.problem, v);
      const RelaxationSdp sdp = assemble(pf.problem, aug, *pf.order, v);
      std::vector<double> y;
      for (const auto& m : sdp.basis.monomials()) y.push_back(m.evaluate(c.u));
      for (const auto& row : sdp.equalities) {
        double lhs = -row.rhs.get_d(), mag = 1.0;
        for (const auto& [i, coef] : row.coeffs) {
          lhs += coef.get_d() * y[static_cast<std::size_t>(i)];
          mag = std::max(mag, std::abs(coef.get_d() * y[static_cast<std::size_t>(i)]));
        }
        worst = std::max(worst, std::abs(lhs) / mag);
      }
      for (const auto& b : sdp.blocks) {
        const Eigen::MatrixXd m = moment_matrix_values(y, b);
        const double lo = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff();
        worst = std::max(worst, -lo / std::max(1.0, m.norm()));
      }
    }
  }
  report("3.point_mass_feasibility", worst <= 1e-6, "worst relative residual " + fmt("%.2e", worst));
}

void duality_and_monotonicity(const std::vector<CorpusRun>& runs) {
  bool sandwich = true;
  std::string detail;
  for (const auto& cr : runs) {
    const RunReport& r = cr.report;
    const double tol = 1e-6 * (1 + std::abs(r.bound));
    bool ok = solved(r.solution) && r.solution.dual_obj <= r.bound + 10 * tol;
    if (r.known_optimum) ok = ok && r.bound <= *r.known_optimum + 10 * tol;
    if (r.certificate) {
      for (const auto& c : r.certificate->checks) ok = ok && (!c.feasible || c.objective >= r.bound - 10 * tol);
    }
    sandwich = sandwich && ok;
    if (!ok) detail += " " + cr.name;
  }
  report("3.weak_duality", sandwich, detail.empty() ? "dual <= bound <= f(x*) on all six examples" : "violated by" + detail);

  // Bounds are compared only between converged solves.
  struct Series {
    std::string file;
    RelaxationVariant v;
    int lo, hi;
  };
  const std::vector<Series> series = {{"m5_quadratic", RelaxationVariant::kBaselinePutinar, 1, 6},
                                      {"motzkin_ball", RelaxationVariant::kBaselinePutinar, 3, 5},
                                      {"motzkin_ball", RelaxationVariant::kJacobianSchmudgen, 4, 5},
                                      {"robinson_eq", RelaxationVariant::kJacobianSchmudgen, 4, 5}};
  bool monotone = true;
  std::string mdetail;
  int compared = 0;
  for (const auto& s : series) {
    const ProblemFile pf = corpus(s.file);
    std::optional<double> prev;
    for (int n = s.lo; n <= s.hi; ++n) {
      const RunReport r = solve_at(pf, s.v, n, false);
      if (!solved(r.solution)) continue;
      if (prev && r.bound < *prev - 1e-6 * (1 + std::abs(*prev))) {
        monotone = false;
        mdetail += " " + s.file + " N=" + std::to_string(n);
      }
      if (prev) ++compared;
      prev = r.bound;
    }
  }
  report("3.order_monotonicity", monotone && compared > 0,
         mdetail.empty() ? std::to_string(compared) + " consecutive converged pairs nondecreasing"
                         : "decreases at" + mdetail);
}

void extraction_round_trip() {
  std::mt19937 rng(4);
  std::uniform_real_distribution<double> coord(-2.0, 2.0), weight(0.2, 1.0);
  double worst = 0.0;
  bool ok = true;
  int cases = 0;
  for (int n = 1; n <= 3; ++n) {
    for (int k = 1; k <= 4; ++k) {
      for (int trial = 0; trial < 10; ++trial) {
        const int order = n == 1 ? std::max(2, k) : 3;
        const OptProblem p(Polynomial::constant(n, 0), {}, {});
        const RelaxationSdp sdp = assemble(p, AugmentedSystem{}, order, RelaxationVariant::kBaselinePutinar);
        Points atoms;
        std::vector<double> w;
        // Atoms at least 0.5 apart, so the rank tolerance can resolve them.
        while (static_cast<int>(atoms.size()) < k) {
          std::vector<double> u(static_cast<std::size_t>(n));
          for (auto& x : u) x = coord(rng);
          bool far = true;
          for (const auto& a : atoms) far = far && distance(a, u) >= 0.5;
          if (far) atoms.push_back(u);
        }
        for (int a = 0; a < k; ++a) w.push_back(weight(rng));
        const double total = std::accumulate(w.begin(), w.end(), 0.0);
        std::vector<double> y(static_cast<std::size_t>(sdp.basis.size()), 0.0);
        for (int a = 0; a < k; ++a) {
          for (int i = 0; i < sdp.basis.size(); ++i) {
            y[static_cast<std::size_t>(i)] += w[static_cast<std::size_t>(a)] / total *
                                              sdp.basis.monomial(i).evaluate(atoms[static_cast<std::size_t>(a)]);
          }
        }
        ++cases;
        try {
          const Points got = extract_minimizers(y, sdp);
          if (static_cast<int>(got.size()) != k) {
            ok = false;
            continue;
          }
          for (const auto& want : atoms) {
            double best = INFINITY;
            for (const auto& g : got) best = std::min(best, distance(g, want));
            worst = std::max(worst, best);
          }
          for (const auto& g : got) {
            double best = INFINITY;
            for (const auto& want : atoms) best = std::min(best, distance(g, want));
            worst = std::max(worst, best);
          }
        } catch (const std::exception&) {
          ok = false;
        }
      }
    }
  }
  report("3.extraction_round_trip", ok && worst <= 1e-6,
         std::to_string(cases) + " atomic measures, worst Hausdorff distance " + fmt("%.2e", worst));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<CorpusRun> runs = worked_examples();
  baseline_contrast();
  eta_oracle();
  minor_rank_brute_force();
  generator_counts();
  point_mass_feasibility();
  duality_and_monotonicity(runs);
  extraction_round_trip();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("%d criteria failed (%.1fs)\n", g_failures, secs);
  return g_failures == 0 ? 0 : 1;
}
