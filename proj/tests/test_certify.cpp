#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "jacsdp/certify.hpp"
#include "jacsdp/sdp.hpp"
#include "test_util.hpp"

namespace jacsdp {
namespace {

using Eigen::MatrixXd;
using Points = std::vector<std::vector<double>>;

// Moments of Σ w_i δ(u_i) on the basis.
std::vector<double> atomic_moments(const MomentBasis& basis, const Points& atoms, const std::vector<double>& w) {
  std::vector<double> y(static_cast<std::size_t>(basis.size()), 0.0);
  for (std::size_t a = 0; a < atoms.size(); ++a) {
    for (int k = 0; k < basis.size(); ++k) y[static_cast<std::size_t>(k)] += w[a] * basis.monomial(k).evaluate(atoms[a]);
  }
  return y;
}

double hausdorff(const Points& a, const Points& b) {
  auto dist = [](const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += (p[i] - q[i]) * (p[i] - q[i]);
    return std::sqrt(s);
  };
  auto directed = [&](const Points& x, const Points& y) {
    double worst = 0.0;
    for (const auto& p : x) {
      double best = INFINITY;
      for (const auto& q : y) best = std::min(best, dist(p, q));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

// Moment-only relaxation of the unconstrained problem in n variables.
RelaxationSdp plain_relaxation(int n, int order) {
  const OptProblem p(Polynomial::constant(n, 0), {}, {});
  return assemble(p, AugmentedSystem{}, order, RelaxationVariant::kBaselinePutinar);
}

TEST(NumericalRankTest, Examples) {
  EXPECT_EQ(numerical_rank(MatrixXd::Identity(3, 3), 1e-6), 3);
  Eigen::VectorXd v(4);
  v << 1, -2, 0.5, 3;
  EXPECT_EQ(numerical_rank(v * v.transpose(), 1e-6), 1);
  EXPECT_EQ(numerical_rank(MatrixXd::Zero(2, 2), 1e-6), 0);
  EXPECT_THROW(numerical_rank(MatrixXd::Zero(2, 3), 1e-6), std::invalid_argument);
}

TEST(FlatExtensionTest, PointMassIsFlat) {
  const RelaxationSdp sdp = plain_relaxation(2, 3);
  const std::vector<double> y = atomic_moments(sdp.basis, {{0.3, -0.7}}, {1.0});
  const CertificateReport rep = rank_table(y, sdp, 3);
  EXPECT_TRUE(rep.fec);
  for (const auto& r : rep.ranks) {
    EXPECT_EQ(r.rank, 1);
    EXPECT_EQ(r.previous_rank, 1);
  }
  EXPECT_EQ(rep.moment_rank, 1);
}

TEST(FlatExtensionTest, GenericMeasureIsNotFlat) {
  std::mt19937 rng(2);
  const RelaxationSdp sdp = plain_relaxation(2, 3);
  Points atoms;
  std::vector<double> w;
  for (int i = 0; i < 40; ++i) {
    atoms.push_back(testing::random_point(rng, 2));
    w.push_back(1.0 / 40);
  }
  const CertificateReport rep = rank_table(atomic_moments(sdp.basis, atoms, w), sdp, 3);
  EXPECT_FALSE(rep.fec);
  EXPECT_EQ(rep.ranks[0].rank, 10);
  EXPECT_EQ(rep.ranks[0].previous_rank, 6);
  EXPECT_FALSE(flat_extension_check(atomic_moments(sdp.basis, atoms, w), sdp).fec);
  EXPECT_THROW(rank_table(atomic_moments(sdp.basis, atoms, w), plain_relaxation(2, 1), 1), std::invalid_argument);
}

TEST(FlatExtensionTest, AggregateFailsWhenAnyBlockFails) {
  // Atoms at ±1: the moment matrix is flat, but the localizing matrix of x1,
  // [[y1, y2], [y2, y3]] = [[0, 1], [1, 0]], has one positive eigenvalue
  // against none for its truncation [[y1]].
  const OptProblem p(Polynomial::constant(1, 0), {}, {Polynomial::variable(1, 0)});
  const RelaxationSdp sdp = assemble(p, AugmentedSystem{}, 2, RelaxationVariant::kBaselinePutinar);
  const std::vector<double> y = atomic_moments(sdp.basis, {{1.0}, {-1.0}}, {0.5, 0.5});
  const CertificateReport all = rank_table(y, sdp, 2);
  ASSERT_EQ(all.ranks.size(), 2u);
  EXPECT_EQ(all.ranks[0].rank, all.ranks[0].previous_rank);
  EXPECT_EQ(all.ranks[1].rank, 1);
  EXPECT_EQ(all.ranks[1].previous_rank, 0);
  EXPECT_FALSE(all.fec);
  const CertificateReport moment_only = rank_table(y, sdp, 2, 1e-6, true);
  EXPECT_EQ(moment_only.ranks.size(), 1u);
  EXPECT_TRUE(moment_only.fec);
}

TEST(ExtractionTest, PointMassRecoversPoint) {
  const RelaxationSdp sdp = plain_relaxation(3, 3);
  const std::vector<double> u = {0.25, -1.5, 2.0};
  const Points pts = extract_minimizers(atomic_moments(sdp.basis, {u}, {1.0}), sdp);
  ASSERT_EQ(pts.size(), 1u);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(pts[0][static_cast<std::size_t>(i)], u[static_cast<std::size_t>(i)], 1e-9);
}

TEST(ExtractionTest, AtomicRoundTrip) {
  std::mt19937 rng(57);
  std::uniform_real_distribution<double> wd(0.2, 1.0);
  for (int n = 1; n <= 3; ++n) {
    for (int k = 1; k <= 4; ++k) {
      for (int trial = 0; trial < 10; ++trial) {
        // Large enough for the rank to stabilize: in one variable the order-k
        // and order-(k-1) moment matrices both have rank k.
        const int order = n == 1 ? std::max(2, k) : 3;
        const RelaxationSdp sdp = plain_relaxation(n, order);
        Points atoms;
        std::vector<double> w;
        // Atoms closer than the rank tolerance can resolve are not
        // distinguishable from one, so they are kept at least 0.5 apart.
        while (static_cast<int>(atoms.size()) < k) {
          const std::vector<double> u = testing::random_point(rng, n, 2.0);
          bool far = true;
          for (const auto& a : atoms) far = far && hausdorff({a}, {u}) >= 0.5;
          if (far) atoms.push_back(u);
        }
        for (int a = 0; a < k; ++a) w.push_back(wd(rng));
        double sum = 0.0;
        for (double v : w) sum += v;
        for (double& v : w) v /= sum;
        const std::vector<double> y = atomic_moments(sdp.basis, atoms, w);
        const CertificateReport rep = flat_extension_check(y, sdp);
        ASSERT_TRUE(rep.fec) << "n=" << n << " k=" << k;
        ASSERT_EQ(rep.moment_rank, k) << "n=" << n << " trial=" << trial << " atoms " << ::testing::PrintToString(atoms);
        const Points got = extract_minimizers(y, sdp);
        ASSERT_EQ(static_cast<int>(got.size()), k);
        EXPECT_LE(hausdorff(got, atoms), 1e-6) << "n=" << n << " k=" << k << " trial=" << trial;
      }
    }
  }
}

TEST(ExtractionTest, InvariantUnderSeed) {
  const RelaxationSdp sdp = plain_relaxation(2, 3);
  const Points atoms = {{1.0, 0.5}, {-0.5, 2.0}, {0.0, -1.0}};
  const std::vector<double> y = atomic_moments(sdp.basis, atoms, {0.5, 0.3, 0.2});
  const CertificateReport rep = flat_extension_check(y, sdp);
  ASSERT_TRUE(rep.fec);
  const int size = sdp.basis.prefix_size(rep.order);
  const MatrixXd m = moment_matrix_values(y, sdp.blocks[0]).topLeftCorner(size, size);
  const Points first = extract_atoms(m, sdp.basis, rep.moment_rank, 1e-6, 1u);
  for (unsigned seed : {2u, 99u, 12345u}) {
    EXPECT_LE(hausdorff(extract_atoms(m, sdp.basis, rep.moment_rank, 1e-6, seed), first), 1e-6);
  }
}

TEST(ExtractionTest, RefusesWithoutFlatness) {
  std::mt19937 rng(8);
  const RelaxationSdp sdp = plain_relaxation(2, 2);
  Points atoms;
  for (int i = 0; i < 30; ++i) atoms.push_back(testing::random_point(rng, 2));
  const std::vector<double> y = atomic_moments(sdp.basis, atoms, std::vector<double>(30, 1.0 / 30));
  EXPECT_THROW(extract_minimizers(y, sdp), CertificationRefused);
  EXPECT_THROW(extract_atoms(MatrixXd::Identity(3, 3), sdp.basis, 4), ExtractionFailed);
}

TEST(VerifyCandidateTest, Examples) {
  const OptProblem ball = testing::corpus("motzkin_ball").problem;
  const std::vector<double> origin = {0, 0, 0};
  const PointCheck a = verify_candidate(origin, ball, -1.6948e-8);
  EXPECT_TRUE(a.feasible);
  EXPECT_TRUE(a.certified);
  EXPECT_EQ(a.objective, 0.0);
  const std::vector<double> ones = {1, 1, 1};
  const PointCheck b = verify_candidate(ones, ball, -1.6948e-8);
  EXPECT_FALSE(b.feasible);
  EXPECT_FALSE(b.certified);
  EXPECT_NEAR(b.min_inequality, -2.0, 1e-12);

  const OptProblem m5 = testing::corpus("m5_quadratic").problem;
  const std::vector<double> u = {5.1926, 1.0};
  const PointCheck c = verify_candidate(u, m5, 27.9629);
  EXPECT_TRUE(c.feasible);
  EXPECT_LE(c.excess, 1e-3);
  EXPECT_TRUE(c.certified);
}

TEST(CertificateJsonTest, Fields) {
  const RelaxationSdp sdp = plain_relaxation(1, 2);
  CertificateReport rep = flat_extension_check(atomic_moments(sdp.basis, {{0.5}}, {1.0}), sdp);
  rep.points = {{0.5}};
  const auto j = to_json(rep);
  EXPECT_EQ(j["fec"], true);
  EXPECT_EQ(j["moment_rank"], 1);
  EXPECT_EQ(j["points"][0][0], 0.5);
  EXPECT_TRUE(j["ranks"].is_array());
}

}  // namespace
}  // namespace jacsdp
