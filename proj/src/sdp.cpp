#include "jacsdp/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <optional>

#include "jacsdp/sdpa.hpp"

namespace jacsdp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::kOptimal: return "optimal";
    case SdpStatus::kNearOptimal: return "near-optimal";
    case SdpStatus::kInfeasible: return "infeasible";
    case SdpStatus::kUnbounded: return "unbounded";
    case SdpStatus::kMaxIter: return "max-iter";
  }
  return "unknown";
}

Eigen::MatrixXd block_value(const SdpBlock& block, std::span<const double> y) {
  MatrixXd m = MatrixXd::Zero(block.size, block.size);
  for (const auto& [var, entries] : block.coeffs) {
    const double yi = y[static_cast<std::size_t>(var)];
    if (yi == 0.0) continue;
    for (const auto& e : entries) {
      m(e.row, e.col) += yi * e.value;
      if (e.row != e.col) m(e.col, e.row) += yi * e.value;
    }
  }
  for (const auto& e : block.constant) {
    m(e.row, e.col) -= e.value;
    if (e.row != e.col) m(e.col, e.row) -= e.value;
  }
  return m;
}

Eigen::MatrixXd moment_matrix_values(std::span<const double> y, const LmiBlock& block) {
  MatrixXd m = MatrixXd::Zero(block.size, block.size);
  for (const auto& [var, entries] : block.coeffs) {
    const double yi = y[static_cast<std::size_t>(var)];
    for (const auto& e : entries) {
      const double v = yi * e.value.get_d();
      m(e.row, e.col) += v;
      if (e.row != e.col) m(e.col, e.row) += v;
    }
  }
  return m;
}

namespace {

struct Block {
  int size = 0;
  MatrixXd constant;
  // Per coefficient matrix: variable index and entries (row <= col).
  std::vector<int> vars;
  std::vector<std::vector<SymEntry>> mats;
  // Row indices touched by each coefficient matrix.
  std::vector<std::vector<int>> touched;
};

// Scaling data for one block at the current iterate.
struct Scaling {
  MatrixXd g;      // W = G G^T, G^{-1} X G^{-T} = G^T S G = diag(lambda)
  MatrixXd g_inv;
  MatrixXd w;
  VectorXd lambda;
};

std::vector<Block> internal_blocks(const LinearSdp& sdp) {
  std::vector<Block> blocks;
  for (const auto& b : sdp.blocks) {
    if (b.diagonal) {
      // Each diagonal entry becomes its own 1x1 block.
      std::vector<Block> diag(static_cast<std::size_t>(b.size));
      for (auto& d : diag) {
        d.size = 1;
        d.constant = MatrixXd::Zero(1, 1);
      }
      for (const auto& e : b.constant) {
        if (e.row != e.col) throw std::invalid_argument("off-diagonal entry in diagonal block");
        diag[static_cast<std::size_t>(e.row)].constant(0, 0) += e.value;
      }
      for (const auto& [var, entries] : b.coeffs) {
        for (const auto& e : entries) {
          if (e.row != e.col) throw std::invalid_argument("off-diagonal entry in diagonal block");
          auto& d = diag[static_cast<std::size_t>(e.row)];
          d.vars.push_back(var);
          d.mats.push_back({{0, 0, e.value}});
        }
      }
      for (auto& d : diag) {
        d.touched.assign(d.vars.size(), {0});
        blocks.push_back(std::move(d));
      }
      continue;
    }
    Block blk;
    blk.size = b.size;
    blk.constant = MatrixXd::Zero(b.size, b.size);
    for (const auto& e : b.constant) {
      blk.constant(e.row, e.col) += e.value;
      if (e.row != e.col) blk.constant(e.col, e.row) += e.value;
    }
    for (const auto& [var, entries] : b.coeffs) {
      blk.vars.push_back(var);
      blk.mats.push_back(entries);
      std::vector<int> rows;
      for (const auto& e : entries) {
        rows.push_back(e.row);
        rows.push_back(e.col);
      }
      std::sort(rows.begin(), rows.end());
      rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
      blk.touched.push_back(std::move(rows));
    }
    blocks.push_back(std::move(blk));
  }
  return blocks;
}

double inner(const std::vector<SymEntry>& entries, const MatrixXd& m) {
  double s = 0.0;
  for (const auto& e : entries) {
    s += e.value * (e.row == e.col ? m(e.row, e.col) : m(e.row, e.col) + m(e.col, e.row));
  }
  return s;
}

class InteriorPoint {
 public:
  InteriorPoint(const LinearSdp& sdp, const SdpOptions& opt)
      : opt_(opt), m_(sdp.num_vars), blocks_(internal_blocks(sdp)) {
    c_ = VectorXd::Zero(m_);
    for (int i = 0; i < m_ && i < static_cast<int>(sdp.objective.size()); ++i) {
      c_(i) = sdp.objective[static_cast<std::size_t>(i)];
    }
    for (const auto& b : blocks_) total_size_ += b.size;
    eq_rows_ = sdp.eq_rows;
    eq_rhs_ = sdp.eq_rhs;
  }

  SdpSolution run() {
    SdpSolution sol;
    if (!reduce_equalities(sol)) return sol;
    if (q_ == 0) return fixed_point_solution(sol);
    initialize();

    Best best;
    double prev_metric = std::numeric_limits<double>::infinity();
    int stalls = 0;
    for (int iter = 0; iter <= opt_.max_iter; ++iter) {
      const Metrics mt = metrics();
      if (opt_.verbose) {
        std::fprintf(stderr,
                     "%3d  pobj % .10e  dobj % .10e  gap %.2e  pinf %.2e  dinf %.2e  mu %.2e  step %.2e %.2e%s\n",
                     iter, mt.moment_obj, mt.sos_obj, mt.rel_gap, mt.moment_inf, mt.sos_inf, mt.mu,
                     last_ap_, last_ad_, use_llt_ ? "" : "  ldlt");
      }
      const double metric = std::max({mt.rel_gap, mt.moment_inf, mt.sos_inf});
      if (metric < best.metric) best = Best{metric, iter, y_, x_, mt};
      if (mt.rel_gap <= opt_.gap_tol && mt.moment_inf <= opt_.feas_tol && mt.sos_inf <= opt_.feas_tol) {
        return finish(sol, SdpStatus::kOptimal, iter, mt, "converged");
      }
      if (auto status = detect_certificate(mt)) {
        return finish(sol, *status, iter, mt, "infeasibility certificate detected");
      }
      if (iter == opt_.max_iter) break;
      if (!step(mt)) {
        sol.message = "Newton system breakdown";
        break;
      }
      if (metric > 0.9 * prev_metric && last_step_ < 1e-3) {
        if (++stalls >= 5) {
          sol.message = "progress stalled";
          break;
        }
      } else {
        stalls = 0;
      }
      prev_metric = std::min(prev_metric, metric);
    }

    y_ = best.y;
    x_ = best.x;
    const double tol = 1e-6;
    const bool near = best.mt.rel_gap <= tol && best.mt.moment_inf <= tol && best.mt.sos_inf <= tol;
    if (sol.message.empty()) sol.message = "iteration limit reached";
    return finish(sol, near ? SdpStatus::kNearOptimal : SdpStatus::kMaxIter, best.iter, best.mt,
                  sol.message);
  }

 private:
  struct Metrics {
    double moment_obj = 0, sos_obj = 0, rel_gap = 0, moment_inf = 0, sos_inf = 0, mu = 0;
    VectorXd rp;                   // Z^T(A(X) - c)
    std::vector<MatrixXd> rd;      // F(y) - S
  };
  struct Best {
    double metric = std::numeric_limits<double>::infinity();
    int iter = 0;
    VectorXd y;
    std::vector<MatrixXd> x;
    Metrics mt;
  };

  // y = y_p + Z t with Z an orthonormal null-space basis of the equality rows.
  bool reduce_equalities(SdpSolution& sol) {
    const int r = static_cast<int>(eq_rows_.size());
    if (r == 0) {
      z_ = MatrixXd::Identity(m_, m_);
      yp_ = VectorXd::Zero(m_);
      q_ = m_;
      return true;
    }
    MatrixXd e = MatrixXd::Zero(r, m_);
    VectorXd rhs(r);
    for (int k = 0; k < r; ++k) {
      for (const auto& [i, v] : eq_rows_[static_cast<std::size_t>(k)]) e(k, i) += v;
      rhs(k) = eq_rhs_[static_cast<std::size_t>(k)];
    }
    Eigen::ColPivHouseholderQR<MatrixXd> qr(e.transpose());
    qr.setThreshold(opt_.rank_threshold);
    const int rank = static_cast<int>(qr.rank());
    rank_ = rank;
    const MatrixXd q_full = qr.householderQ();
    z_ = q_full.rightCols(m_ - rank);
    q_ = m_ - rank;

    // Particular solution from the independent rows: E^T P = Q R.
    const MatrixXd r_top = qr.matrixR().topLeftCorner(rank, rank).triangularView<Eigen::Upper>();
    VectorXd rhs_perm = qr.colsPermutation().transpose() * rhs;
    VectorXd w = r_top.transpose().triangularView<Eigen::Lower>().solve(rhs_perm.head(rank));
    yp_ = q_full.leftCols(rank) * w;
    const double resid = (e * yp_ - rhs).lpNorm<Eigen::Infinity>();
    eq_resid_ = resid;
    if (resid > 1e-8 * std::max(1.0, rhs.lpNorm<Eigen::Infinity>())) {
      sol.status = SdpStatus::kInfeasible;
      sol.y.assign(static_cast<std::size_t>(m_), 0.0);
      sol.equality_rank = rank;
      sol.equality_residual = resid;
      sol.message = "inconsistent equality constraints";
      return false;
    }
    return true;
  }

  SdpSolution fixed_point_solution(SdpSolution& sol) {
    y_ = yp_;
    double min_eig = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks_) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(value(b, y_));
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    sol.y.assign(y_.data(), y_.data() + m_);
    sol.primal_obj = sol.dual_obj = c_.dot(y_);
    sol.equality_rank = rank_;
    sol.status = min_eig >= -opt_.feas_tol ? SdpStatus::kOptimal : SdpStatus::kInfeasible;
    sol.message = "equalities determine the moment vector";
    return sol;
  }

  MatrixXd value(const Block& b, const VectorXd& y) const {
    MatrixXd m = -b.constant;
    for (std::size_t k = 0; k < b.vars.size(); ++k) {
      const double yi = y(b.vars[k]);
      if (yi == 0.0) continue;
      for (const auto& e : b.mats[k]) {
        m(e.row, e.col) += yi * e.value;
        if (e.row != e.col) m(e.col, e.row) += yi * e.value;
      }
    }
    return m;
  }

  // Σ_i v_i A_i (no constant).
  MatrixXd adjoint(const Block& b, const VectorXd& v) const {
    MatrixXd m = MatrixXd::Zero(b.size, b.size);
    for (std::size_t k = 0; k < b.vars.size(); ++k) {
      const double vi = v(b.vars[k]);
      if (vi == 0.0) continue;
      for (const auto& e : b.mats[k]) {
        m(e.row, e.col) += vi * e.value;
        if (e.row != e.col) m(e.col, e.row) += vi * e.value;
      }
    }
    return m;
  }

  // (A_i • X_b)_i summed over blocks.
  VectorXd apply(const std::vector<MatrixXd>& x) const {
    VectorXd out = VectorXd::Zero(m_);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const Block& blk = blocks_[b];
      for (std::size_t k = 0; k < blk.vars.size(); ++k) out(blk.vars[k]) += inner(blk.mats[k], x[b]);
    }
    return out;
  }

  void initialize() {
    // Frobenius norms of the reduced coefficient matrices per block via the
    // Gram matrix of the full-space coefficients.
    const VectorXd b_red = -z_.transpose() * c_;
    const double bmax = b_red.size() ? b_red.cwiseAbs().maxCoeff() : 0.0;
    x_.clear();
    s_.clear();
    y_ = yp_;
    for (const auto& blk : blocks_) {
      std::vector<std::vector<std::pair<int, double>>> at(static_cast<std::size_t>(blk.size * blk.size));
      for (std::size_t k = 0; k < blk.vars.size(); ++k) {
        for (const auto& e : blk.mats[k]) {
          at[static_cast<std::size_t>(e.row * blk.size + e.col)].emplace_back(blk.vars[k],
                                                                               e.value);
        }
      }
      MatrixXd gram = MatrixXd::Zero(m_, m_);
      for (std::size_t pos = 0; pos < at.size(); ++pos) {
        const int row = static_cast<int>(pos) / blk.size;
        const int col = static_cast<int>(pos) % blk.size;
        const double w = row == col ? 1.0 : 2.0;
        for (const auto& [i, vi] : at[pos]) {
          for (const auto& [j, vj] : at[pos]) gram(i, j) += w * vi * vj;
        }
      }
      const VectorXd norms = ((z_.transpose() * gram).cwiseProduct(z_.transpose())).rowwise().sum().cwiseMax(0.0).cwiseSqrt();
      const double s = blk.size;
      double xi = std::max(10.0, std::sqrt(s));
      double eta = std::max(10.0, std::sqrt(s));
      for (int k = 0; k < q_; ++k) {
        xi = std::max(xi, s * (1.0 + std::abs(b_red(k))) / (1.0 + norms(k)));
        eta = std::max(eta, norms(k));
      }
      (void)bmax;
      eta = std::max(eta, value(blk, yp_).norm());
      x_.push_back(xi * MatrixXd::Identity(blk.size, blk.size));
      s_.push_back(eta * MatrixXd::Identity(blk.size, blk.size));
    }
    norm_b_ = b_red.norm();
    norm_c_ = 0.0;
    for (const auto& blk : blocks_) norm_c_ += value(blk, yp_).squaredNorm();
    norm_c_ = std::sqrt(norm_c_);
  }

  Metrics metrics() const {
    Metrics mt;
    mt.rp = z_.transpose() * (apply(x_) - c_);
    double rd2 = 0.0;
    double fy2 = 0.0;
    double cx = 0.0;
    double xs = 0.0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const MatrixXd fy = value(blocks_[b], y_);
      fy2 += fy.squaredNorm();
      mt.rd.push_back(fy - s_[b]);
      rd2 += mt.rd.back().squaredNorm();
      cx += value(blocks_[b], yp_).cwiseProduct(x_[b]).sum();
      xs += x_[b].cwiseProduct(s_[b]).sum();
    }
    mt.moment_obj = c_.dot(y_);
    mt.sos_obj = c_.dot(yp_) - cx;
    mt.rel_gap = std::abs(mt.moment_obj - mt.sos_obj) /
                 (1.0 + std::abs(mt.moment_obj) + std::abs(mt.sos_obj));
    // Relative to the blocks themselves as well: when the optimum is only
    // approached as y grows without bound, the absolute residual is pure
    // rounding noise of size eps * |F(y)|.
    mt.moment_inf = std::sqrt(rd2) / (1.0 + norm_c_ + std::sqrt(fy2));
    mt.sos_inf = mt.rp.norm() / (1.0 + norm_b_);
    mt.mu = xs / total_size_;
    return mt;
  }

  std::optional<SdpStatus> detect_certificate(const Metrics& mt) const {
    // Moment side infeasible: X ⪰ 0 with Z^T A(X) ≈ 0 and F(y_p) • X < 0.
    double cx = 0.0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) cx += value(blocks_[b], yp_).cwiseProduct(x_[b]).sum();
    if (cx < 0) {
      const VectorXd ax = z_.transpose() * apply(x_);
      if (ax.norm() / -cx < 1e-8 && -cx > 1e8) return SdpStatus::kInfeasible;
    }
    // Moment side unbounded: direction d = y - y_p with A^T(d) ⪰ 0, c^T d < 0.
    const double cd = c_.dot(y_ - yp_);
    if (cd < 0) {
      double rd = 0.0;
      for (const auto& r : mt.rd) rd += r.squaredNorm();
      const double ratio = (std::sqrt(rd) + norm_c_) / -cd;
      if (ratio < 1e-8 && -cd > 1e8) return SdpStatus::kUnbounded;
    }
    return std::nullopt;
  }

  bool compute_scaling() {
    scal_.clear();
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      Eigen::LLT<MatrixXd> lx(x_[b]);
      Eigen::LLT<MatrixXd> ls(s_[b]);
      if (lx.info() != Eigen::Success || ls.info() != Eigen::Success) return false;
      const MatrixXd lxm = lx.matrixL();
      const MatrixXd lsm = ls.matrixL();
      Eigen::JacobiSVD<MatrixXd> svd(lsm.transpose() * lxm, Eigen::ComputeFullU | Eigen::ComputeFullV);
      Scaling sc;
      sc.lambda = svd.singularValues();
      if (sc.lambda.minCoeff() <= 0.0) return false;
      const VectorXd inv_sqrt = sc.lambda.cwiseSqrt().cwiseInverse();
      sc.g = lxm * svd.matrixV() * inv_sqrt.asDiagonal();
      sc.g_inv = sc.lambda.cwiseInverse().asDiagonal() * sc.g.transpose() * s_[b];
      sc.w = sc.g * sc.g.transpose();
      scal_.push_back(std::move(sc));
    }
    return true;
  }

  // M_ij = Σ_b Tr(A_i W A_j W).
  MatrixXd schur_full() const {
    MatrixXd mfull = MatrixXd::Zero(m_, m_);
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const Block& blk = blocks_[b];
      const MatrixXd& w = scal_[b].w;
      const int s = blk.size;
      if (s == 1) {
        const double w2 = w(0, 0) * w(0, 0);
        for (std::size_t k = 0; k < blk.vars.size(); ++k) {
          const double ak = blk.mats[k][0].value;
          for (std::size_t l = 0; l < blk.vars.size(); ++l) {
            mfull(blk.vars[k], blk.vars[l]) += ak * blk.mats[l][0].value * w2;
          }
        }
        continue;
      }
      std::vector<int> local(static_cast<std::size_t>(s), -1);
      for (std::size_t k = 0; k < blk.vars.size(); ++k) {
        const auto& rows = blk.touched[k];
        const int nr = static_cast<int>(rows.size());
        for (int t = 0; t < nr; ++t) local[static_cast<std::size_t>(rows[static_cast<std::size_t>(t)])] = t;
        MatrixXd a_w = MatrixXd::Zero(nr, s);  // rows of A_k W
        for (const auto& e : blk.mats[k]) {
          a_w.row(local[static_cast<std::size_t>(e.row)]) += e.value * w.row(e.col);
          if (e.row != e.col) a_w.row(local[static_cast<std::size_t>(e.col)]) += e.value * w.row(e.row);
        }
        MatrixXd w_cols(s, nr);
        for (int t = 0; t < nr; ++t) w_cols.col(t) = w.col(rows[static_cast<std::size_t>(t)]);
        const MatrixXd u = w_cols * a_w;  // W A_k W
        const int vk = blk.vars[k];
        for (std::size_t l = k; l < blk.vars.size(); ++l) {
          const double v = inner(blk.mats[l], u);
          mfull(vk, blk.vars[l]) += v;
          if (l != k) mfull(blk.vars[l], vk) += v;
        }
      }
    }
    return mfull;
  }

  struct Direction {
    VectorXd dy;
    std::vector<MatrixXd> dx, ds;        // unscaled
    std::vector<MatrixXd> dx_t, ds_t;    // scaled
  };

  Direction solve_direction(const std::vector<MatrixXd>& rc, const Metrics& mt) {
    std::vector<MatrixXd> t(blocks_.size());
    std::vector<MatrixXd> zc(blocks_.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const auto& sc = scal_[b];
      const int s = blocks_[b].size;
      zc[b].resize(s, s);
      for (int i = 0; i < s; ++i) {
        for (int j = 0; j < s; ++j) zc[b](i, j) = 2.0 * rc[b](i, j) / (sc.lambda(i) + sc.lambda(j));
      }
      t[b] = sc.g * zc[b] * sc.g.transpose() - sc.w * mt.rd[b] * sc.w;
    }
    const VectorXd rhs = mt.rp + z_.transpose() * apply(t);
    VectorXd dt = schur_solve(rhs);
    Direction d;
    // Refine against the residual of the Gram equations themselves rather than
    // the normal equations; this keeps the certificate side accurate late in
    // the run when the Schur matrix is badly conditioned.
    for (int pass = 0;; ++pass) {
      d = Direction{};
      d.dy = z_ * dt;
      for (std::size_t b = 0; b < blocks_.size(); ++b) {
        const auto& sc = scal_[b];
        MatrixXd ds = mt.rd[b] + adjoint(blocks_[b], d.dy);
        ds = 0.5 * (ds + ds.transpose()).eval();
        MatrixXd dx = t[b] - sc.w * adjoint(blocks_[b], d.dy) * sc.w;
        d.dx.push_back(0.5 * (dx + dx.transpose()));
        d.ds.push_back(std::move(ds));
      }
      const VectorXd resid = mt.rp + z_.transpose() * apply(d.dx);
      if (pass == 2 || resid.norm() <= 1e-14 * std::max(1.0, rhs.norm())) break;
      dt += schur_solve(resid);
    }
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const auto& sc = scal_[b];
      const MatrixXd dx_t = sc.g_inv * d.dx[b] * sc.g_inv.transpose();
      const MatrixXd ds_t = sc.g.transpose() * d.ds[b] * sc.g;
      d.dx_t.push_back(0.5 * (dx_t + dx_t.transpose()));
      d.ds_t.push_back(0.5 * (ds_t + ds_t.transpose()));
    }
    return d;
  }

  // Largest step keeping diag(lambda) + alpha * D ⪰ 0.
  static double max_step(const VectorXd& lambda, const MatrixXd& d) {
    const VectorXd is = lambda.cwiseSqrt().cwiseInverse();
    const MatrixXd m = is.asDiagonal() * d * is.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
    const double mn = es.eigenvalues().minCoeff();
    return mn >= 0 ? std::numeric_limits<double>::infinity() : -1.0 / mn;
  }

  std::pair<double, double> step_lengths(const Direction& d) const {
    double ap = std::numeric_limits<double>::infinity();
    double ad = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      ap = std::min(ap, max_step(scal_[b].lambda, d.dx_t[b]));
      ad = std::min(ad, max_step(scal_[b].lambda, d.ds_t[b]));
    }
    return {ap, ad};
  }

  // Symmetric diagonal equilibration, then Cholesky; pivoted LDL^T with a
  // tiny shift if Cholesky breaks down.
  bool factor_schur() {
    schur_ = z_.transpose() * (schur_full() * z_);
    schur_ = 0.5 * (schur_ + schur_.transpose()).eval();
    dscale_ = schur_.diagonal().cwiseAbs().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
    MatrixXd scaled = dscale_.asDiagonal() * schur_ * dscale_.asDiagonal();
    llt_.compute(scaled);
    use_llt_ = llt_.info() == Eigen::Success;
    if (use_llt_) return true;
    scaled.diagonal().array() += 1e-13;
    ldlt_.compute(scaled);
    return ldlt_.info() == Eigen::Success;
  }

  VectorXd schur_solve(const VectorXd& rhs) const {
    const VectorXd r = dscale_.cwiseProduct(rhs);
    return dscale_.cwiseProduct(use_llt_ ? VectorXd(llt_.solve(r)) : VectorXd(ldlt_.solve(r)));
  }

  bool step(const Metrics& mt) {
    if (!compute_scaling()) return false;
    if (!factor_schur()) return false;

    // Predictor.
    std::vector<MatrixXd> rc(blocks_.size());
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      rc[b] = MatrixXd((-scal_[b].lambda.array().square()).matrix().asDiagonal());
    }
    const Direction aff = solve_direction(rc, mt);
    auto [ap_max, ad_max] = step_lengths(aff);
    const double ap_a = std::min(1.0, ap_max);
    const double ad_a = std::min(1.0, ad_max);
    double mu_aff = 0.0;
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const MatrixXd xa = MatrixXd(scal_[b].lambda.asDiagonal()) + ap_a * aff.dx_t[b];
      const MatrixXd sa = MatrixXd(scal_[b].lambda.asDiagonal()) + ad_a * aff.ds_t[b];
      mu_aff += xa.cwiseProduct(sa).sum();
    }
    mu_aff /= total_size_;
    const double expo = std::max(1.0, 3.0 * std::pow(std::min(ap_a, ad_a), 2));
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mt.mu, expo), 0.0, 1.0);

    // Corrector.
    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      const MatrixXd prod = aff.dx_t[b] * aff.ds_t[b];
      rc[b] = -0.5 * (prod + prod.transpose());
      rc[b].diagonal().array() += sigma * mt.mu - scal_[b].lambda.array().square();
    }
    const Direction dir = solve_direction(rc, mt);
    auto [ap2, ad2] = step_lengths(dir);
    const double gamma = std::max(0.9, 0.98 - 0.08 * (1.0 - std::min(ap_a, ad_a)));
    const double ap = std::min(1.0, gamma * ap2);
    const double ad = std::min(1.0, gamma * ad2);

    for (std::size_t b = 0; b < blocks_.size(); ++b) {
      x_[b] += ap * dir.dx[b];
      s_[b] += ad * dir.ds[b];
      x_[b] = 0.5 * (x_[b] + x_[b].transpose()).eval();
      s_[b] = 0.5 * (s_[b] + s_[b].transpose()).eval();
    }
    y_ += ad * dir.dy;
    last_step_ = std::min(ap, ad);
    last_ap_ = ap;
    last_ad_ = ad;
    return true;
  }

  SdpSolution finish(SdpSolution& sol, SdpStatus status, int iter, const Metrics& mt,
                     const std::string& message) {
    sol.status = status;
    sol.y.assign(y_.data(), y_.data() + m_);
    sol.primal_obj = mt.moment_obj;
    sol.dual_obj = mt.sos_obj;
    sol.iterations = iter;
    sol.gap = mt.rel_gap;
    sol.primal_infeasibility = mt.moment_inf;
    sol.dual_infeasibility = mt.sos_inf;
    sol.equality_rank = rank_;
    sol.equality_residual = eq_resid_;
    sol.gram = x_;
    sol.message = message;
    return sol;
  }

  SdpOptions opt_;
  int m_ = 0;
  int q_ = 0;
  int rank_ = 0;
  int total_size_ = 0;
  double eq_resid_ = 0.0;
  double norm_b_ = 0.0;
  double norm_c_ = 0.0;
  double last_step_ = 1.0;
  double last_ap_ = 0.0;
  double last_ad_ = 0.0;
  std::vector<Block> blocks_;
  VectorXd c_;
  std::vector<std::vector<std::pair<int, double>>> eq_rows_;
  std::vector<double> eq_rhs_;
  MatrixXd z_;
  VectorXd yp_;
  VectorXd y_;
  std::vector<MatrixXd> x_, s_;
  std::vector<Scaling> scal_;
  MatrixXd schur_;
  VectorXd dscale_;
  Eigen::LLT<MatrixXd> llt_;
  Eigen::LDLT<MatrixXd> ldlt_;
  bool use_llt_ = true;
};

}  // namespace

SdpSolution solve(const LinearSdp& sdp, const SdpOptions& options) {
  if (sdp.blocks.empty()) throw std::invalid_argument("SDP has no PSD block");
  if (sdp.eq_rows.size() != sdp.eq_rhs.size()) throw std::invalid_argument("equality row/rhs mismatch");
  return InteriorPoint(sdp, options).run();
}

SdpSolution solve_external(const LinearSdp& sdp, const ExternalSolverConfig& config) {
  if (config.command_template.empty()) throw std::invalid_argument("no external solver command configured");
  const std::string input = config.work_prefix + ".dat-s";
  const std::string output = config.work_prefix + ".out";
  write_sdpa_file(input, sdp, "jacsdp export for external solver");
  std::string cmd = config.command_template;
  auto replace_all = [&cmd](const std::string& key, const std::string& val) {
    for (std::size_t pos = cmd.find(key); pos != std::string::npos; pos = cmd.find(key, pos + val.size())) {
      cmd.replace(pos, key.size(), val);
    }
  };
  replace_all("{input}", input);
  replace_all("{output}", output);
  const int rc = std::system(cmd.c_str());
  SdpSolution sol;
  if (rc != 0) {
    sol.status = SdpStatus::kMaxIter;
    sol.message = "external solver exited with code " + std::to_string(rc);
    return sol;
  }
  const SdpaResult res = read_sdpa_result_file(output);
  sol.y = res.x;
  sol.primal_obj = res.primal_objective;
  sol.dual_obj = res.dual_objective;
  sol.gap = std::abs(sol.primal_obj - sol.dual_obj) /
            (1.0 + std::abs(sol.primal_obj) + std::abs(sol.dual_obj));
  sol.status = res.phase_optimal ? SdpStatus::kOptimal : SdpStatus::kNearOptimal;
  sol.message = "external solver: " + res.phase;
  return sol;
}

nlohmann::json to_json(const SdpSolution& sol) {
  return {{"status", to_string(sol.status)},
          {"primal_objective", sol.primal_obj},
          {"dual_objective", sol.dual_obj},
          {"iterations", sol.iterations},
          {"relative_gap", sol.gap},
          {"primal_infeasibility", sol.primal_infeasibility},
          {"dual_infeasibility", sol.dual_infeasibility},
          {"equality_rank", sol.equality_rank},
          {"message", sol.message}};
}

}  // namespace jacsdp
