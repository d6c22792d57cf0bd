#include "jacsdp/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "jacsdp/sdp.hpp"

namespace jacsdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

int numerical_rank(const MatrixXd& m, double tau) {
  if (m.rows() != m.cols()) throw std::invalid_argument("numerical_rank needs a square matrix");
  if (m.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  const VectorXd& ev = es.eigenvalues();
  const double cut = tau * std::max(1.0, ev.maxCoeff());
  return static_cast<int>((ev.array() > cut).count());
}

namespace {

const LmiBlock& moment_block(const RelaxationSdp& sdp) {
  for (const auto& b : sdp.blocks) {
    if (b.nu.empty() && b.localized.degree() == 0) return b;
  }
  throw std::invalid_argument("relaxation has no moment matrix block");
}

// Rows of V (s x r) selected greedily in basis order, plus the
// column-echelon form U with U(pivots, :) = I.
struct Echelon {
  std::vector<int> pivots;
  MatrixXd u;
};

Echelon column_echelon(const MatrixXd& v, double tol) {
  // Reduced row echelon form of V^T with partial pivoting over its rows.
  MatrixXd a = v.transpose();
  const int r = static_cast<int>(a.rows());
  const int s = static_cast<int>(a.cols());
  const double scale = std::max(1e-300, a.cwiseAbs().maxCoeff());
  Echelon e;
  int row = 0;
  for (int col = 0; col < s && row < r; ++col) {
    Eigen::Index piv = 0;
    const double best = a.col(col).segment(row, r - row).cwiseAbs().maxCoeff(&piv);
    if (best <= tol * scale) {
      a.col(col).segment(row, r - row).setZero();
      continue;
    }
    a.row(row).swap(a.row(row + static_cast<int>(piv)));
    a.row(row) /= a(row, col);
    for (int k = 0; k < r; ++k) {
      if (k != row && a(k, col) != 0.0) a.row(k) -= a(k, col) * a.row(row);
    }
    e.pivots.push_back(col);
    ++row;
  }
  e.u = a.topRows(row).transpose();
  return e;
}

}  // namespace

CertificateReport rank_table(std::span<const double> y, const RelaxationSdp& sdp, int t,
                             double tau, bool moment_only) {
  const int order = sdp.basis.order();
  if (order < 2) throw std::invalid_argument("flat-extension check needs order >= 2");
  if (t < 1 || t > order) throw std::invalid_argument("truncation order out of range");
  if (static_cast<int>(y.size()) < sdp.basis.size()) {
    throw std::invalid_argument("moment vector shorter than the basis");
  }
  CertificateReport rep;
  rep.order = t;
  rep.extraction = "not attempted";
  bool all_equal = true;
  for (const auto& b : sdp.blocks) {
    const bool is_moment = b.nu.empty() && b.localized.degree() == 0;
    if (moment_only && !is_moment) continue;
    const int d = b.half_degree - (order - t);
    if (d < 0) throw std::invalid_argument("truncation order below a multiplier's half degree");
    RankPair rp;
    rp.label = b.label;
    rp.size = sdp.basis.prefix_size(d);
    const MatrixXd m = moment_matrix_values(y, b).topLeftCorner(rp.size, rp.size);
    rp.rank = numerical_rank(m, tau);
    if (is_moment) rep.moment_rank = rp.rank;
    if (d < 1) {
      rp.skipped = true;
    } else {
      rp.previous_size = sdp.basis.prefix_size(d - 1);
      rp.previous_rank = numerical_rank(m.topLeftCorner(rp.previous_size, rp.previous_size), tau);
      all_equal = all_equal && rp.rank == rp.previous_rank;
    }
    rep.ranks.push_back(rp);
  }
  rep.fec = all_equal;
  return rep;
}

CertificateReport flat_extension_check(std::span<const double> y, const RelaxationSdp& sdp,
                                       double tau, bool moment_only) {
  const int order = sdp.basis.order();
  int lowest = 1;
  for (const auto& b : sdp.blocks) {
    if (moment_only && !(b.nu.empty() && b.localized.degree() == 0)) continue;
    lowest = std::max(lowest, order - b.half_degree);
  }
  for (int t = order; t >= lowest; --t) {
    CertificateReport rep = rank_table(y, sdp, t, tau, moment_only);
    if (rep.fec) return rep;
  }
  return rank_table(y, sdp, order, tau, moment_only);
}

std::vector<std::vector<double>> extract_atoms(const MatrixXd& m, const MomentBasis& basis,
                                               int rank, double tau, unsigned seed) {
  const int s = static_cast<int>(m.rows());
  const int n = basis.nvars();
  if (rank < 1 || rank > s) throw ExtractionFailed("rank out of range for extraction");

  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()));
  const VectorXd lam = es.eigenvalues().tail(rank).cwiseMax(0.0);
  const MatrixXd v = es.eigenvectors().rightCols(rank) * lam.cwiseSqrt().asDiagonal();

  const Echelon ech = column_echelon(v, std::max(tau, 1e-9));
  if (static_cast<int>(ech.pivots.size()) != rank) {
    throw ExtractionFailed("echelon form found " + std::to_string(ech.pivots.size()) +
                           " basis monomials, expected " + std::to_string(rank));
  }

  // Multiplication matrices N_i(j, :) = U(row of x_i * w_j, :).
  std::vector<MatrixXd> mult(static_cast<std::size_t>(n), MatrixXd(rank, rank));
  for (int j = 0; j < rank; ++j) {
    const Monomial& w = basis.monomial(ech.pivots[static_cast<std::size_t>(j)]);
    for (int i = 0; i < n; ++i) {
      const Monomial shifted = w * Monomial::variable(n, i);
      int pos = -1;
      try {
        pos = basis.index(shifted);
      } catch (const std::out_of_range&) {
        pos = -1;
      }
      if (pos < 0 || pos >= s) {
        throw ExtractionFailed("shifted basis monomial lies outside the moment matrix");
      }
      mult[static_cast<std::size_t>(i)].row(j) = ech.u.row(pos);
    }
  }

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  std::string last_reason;
  for (int attempt = 0; attempt < 5; ++attempt) {
    VectorXd w(n);
    for (int i = 0; i < n; ++i) w(i) = unif(rng);
    w /= w.sum();
    MatrixXd comb = MatrixXd::Zero(rank, rank);
    for (int i = 0; i < n; ++i) comb += w(i) * mult[static_cast<std::size_t>(i)];

    Eigen::RealSchur<MatrixXd> schur(comb);
    const MatrixXd& t = schur.matrixT();
    const MatrixXd& q = schur.matrixU();
    bool complex_pair = false;
    for (int k = 0; k + 1 < rank; ++k) {
      if (std::abs(t(k + 1, k)) > 1e-10 * std::max(1.0, t.norm())) complex_pair = true;
    }
    if (complex_pair) {
      last_reason = "complex eigenvalues";
      continue;
    }
    const VectorXd diag = t.diagonal();
    const double spread = std::max(1.0, diag.cwiseAbs().maxCoeff());
    bool separated = true;
    for (int a = 0; a < rank && separated; ++a) {
      for (int b = a + 1; b < rank; ++b) {
        if (std::abs(diag(a) - diag(b)) < 1e-4 * spread) {
          separated = false;
          break;
        }
      }
    }
    if (!separated) {
      last_reason = "eigenvalues not separated";
      continue;
    }
    std::vector<std::vector<double>> points;
    for (int j = 0; j < rank; ++j) {
      std::vector<double> x(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(i)] = q.col(j).dot(mult[static_cast<std::size_t>(i)] * q.col(j));
      }
      points.push_back(std::move(x));
    }
    std::sort(points.begin(), points.end());
    return points;
  }
  throw ExtractionFailed("extraction failed after 5 random combinations: " + last_reason);
}

std::vector<std::vector<double>> extract_minimizers(std::span<const double> y,
                                                    const RelaxationSdp& sdp, double tau,
                                                    bool moment_only) {
  const CertificateReport rep = flat_extension_check(y, sdp, tau, moment_only);
  if (!rep.fec) throw CertificationRefused("flat-extension condition fails; no minimizers extracted");
  const LmiBlock& mb = moment_block(sdp);
  const int size = sdp.basis.prefix_size(rep.order);
  return extract_atoms(moment_matrix_values(y, mb).topLeftCorner(size, size), sdp.basis,
                       rep.moment_rank, tau);
}

PointCheck verify_candidate(std::span<const double> x, const OptProblem& p, double bound,
                            double tol) {
  PointCheck pc;
  pc.point.assign(x.begin(), x.end());
  for (const auto& h : p.equalities) {
    pc.max_equality_violation = std::max(pc.max_equality_violation, std::abs(h.evaluate(x)));
  }
  pc.min_inequality = std::numeric_limits<double>::infinity();
  for (const auto& g : p.inequalities) pc.min_inequality = std::min(pc.min_inequality, g.evaluate(x));
  pc.objective = p.objective.evaluate(x);
  pc.excess = pc.objective - bound;
  pc.feasible = pc.max_equality_violation <= tol && pc.min_inequality >= -tol;
  pc.certified = pc.feasible && pc.excess <= tol;
  return pc;
}

nlohmann::json to_json(const CertificateReport& report) {
  nlohmann::json ranks = nlohmann::json::array();
  for (const auto& r : report.ranks) {
    nlohmann::json j = {{"block", r.label}, {"size", r.size}, {"rank", r.rank}};
    if (r.skipped) {
      j["previous_rank"] = nullptr;
    } else {
      j["previous_size"] = r.previous_size;
      j["previous_rank"] = r.previous_rank;
    }
    ranks.push_back(j);
  }
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"point", c.point},
                      {"objective", c.objective},
                      {"excess", c.excess},
                      {"max_equality_violation", c.max_equality_violation},
                      {"min_inequality", std::isfinite(c.min_inequality) ? nlohmann::json(c.min_inequality)
                                                                         : nlohmann::json(nullptr)},
                      {"feasible", c.feasible},
                      {"certified", c.certified}});
  }
  return {{"fec", report.fec},
          {"order", report.order},
          {"moment_rank", report.moment_rank},
          {"ranks", ranks},
          {"extraction", report.extraction},
          {"points", report.points},
          {"checks", checks}};
}

}  // namespace jacsdp
