#include <cmath>

#include <gtest/gtest.h>

#include "jacsdp/pipeline.hpp"
#include "test_util.hpp"

namespace jacsdp {
namespace {

RunReport run(const std::string& name, RelaxationVariant v, int order, bool certify = true) {
  SolveOptions opt;
  opt.variant = v;
  opt.order = order;
  opt.certify = certify;
  return run_solve(testing::corpus(name), opt);
}

// Every corpus problem at its reference order: the sandwich
// dual <= bound <= f(x*) holds, the flat-extension condition holds and every
// extracted point is a certified global minimizer.
TEST(PipelineTest, CorpusCertifiesAtReferenceOrder) {
  for (const auto& name : testing::corpus_names()) {
    const ProblemFile pf = testing::corpus(name);
    SolveOptions opt;
    opt.order = pf.order;
    const RunReport r = run_solve(pf, opt);
    ASSERT_TRUE(solved(r.solution)) << name;
    const double tol = 1e-6;
    EXPECT_LE(r.solution.dual_obj, r.bound + 10 * tol * (1 + std::abs(r.bound))) << name;
    EXPECT_LE(r.bound, *pf.optimum + 10 * tol * (1 + std::abs(r.bound))) << name;
    ASSERT_TRUE(r.certificate.has_value()) << name;
    EXPECT_TRUE(r.certificate->fec) << name;
    ASSERT_FALSE(r.certificate->checks.empty()) << name;
    for (const auto& c : r.certificate->checks) {
      EXPECT_TRUE(c.certified) << name;
      EXPECT_GE(c.objective, r.bound - 10 * 1e-3) << name;
    }
  }
}

TEST(PipelineTest, BoundsIncreaseWithOrder) {
  double previous = -INFINITY;
  for (int n = 2; n <= 5; ++n) {
    const RunReport r = run("m5_quadratic", RelaxationVariant::kBaselinePutinar, n, false);
    ASSERT_TRUE(solved(r.solution)) << n;
    EXPECT_GE(r.bound, previous - 1e-6) << n;
    EXPECT_LE(r.bound, 2.0 + 1e-3) << n;
    previous = r.bound;
  }
  previous = -INFINITY;
  for (int n = 3; n <= 5; ++n) {
    const RunReport r = run("motzkin_ball", RelaxationVariant::kBaselinePutinar, n, false);
    ASSERT_TRUE(solved(r.solution)) << n;
    EXPECT_GE(r.bound, previous - 1e-6) << n;
    previous = r.bound;
  }
}

TEST(PipelineTest, VariantDominanceAtEqualOrder) {
  for (const std::string name : {"m5_quadratic", "motzkin_ball"}) {
    auto bound = [&](RelaxationVariant v) {
      const RunReport r = run(name, v, 4, false);
      EXPECT_TRUE(solved(r.solution)) << name << " " << to_string(v);
      return r.bound;
    };
    const double allminors = bound(RelaxationVariant::kJacobianAllMinors);
    const double schmudgen = bound(RelaxationVariant::kJacobianSchmudgen);
    const double putinar = bound(RelaxationVariant::kJacobianPutinar);
    const double base_s = bound(RelaxationVariant::kBaselineSchmudgen);
    const double base_p = bound(RelaxationVariant::kBaselinePutinar);
    const double tol = 1e-6 * (1 + std::abs(schmudgen));
    EXPECT_GE(allminors, schmudgen - tol) << name;
    EXPECT_GE(schmudgen, base_s - tol) << name;
    EXPECT_GE(schmudgen, putinar - tol) << name;
    EXPECT_GE(putinar, base_p - tol) << name;
  }
}

TEST(PipelineTest, ScaledSolveReportsOriginalCoordinates) {
  const RunReport r = run("m5_quadratic", RelaxationVariant::kJacobianSchmudgen, 4);
  ASSERT_EQ(r.scaling.size(), 2u);
  ASSERT_TRUE(solved(r.solution));
  // Moments are mapped back: L_f(y) = y_{x1^2} + y_{x2^2} equals the bound.
  const MomentBasis basis(2, 4);
  const double lf = r.solution.y[static_cast<std::size_t>(basis.index(Monomial({2, 0})))] +
                    r.solution.y[static_cast<std::size_t>(basis.index(Monomial({0, 2})))];
  EXPECT_NEAR(lf, r.bound, 1e-6 * r.bound);
  EXPECT_NEAR(r.solution.y[0], 1.0, 1e-9);
  ASSERT_TRUE(r.certificate.has_value());
  ASSERT_EQ(r.certificate->points.size(), 4u);
  for (const auto& p : r.certificate->points) {
    EXPECT_NEAR(std::abs(p[0]), 5.1926, 1e-3);
    EXPECT_NEAR(std::abs(p[1]), 1.0, 1e-3);
  }
}

TEST(PipelineTest, AutoOrderIsMinimal) {
  SolveOptions opt;
  opt.certify = false;
  const RunReport r = run_solve(testing::corpus("motzkin_ball"), opt);
  EXPECT_EQ(r.order, r.minimal_order);
  EXPECT_EQ(r.order, 4);
}

TEST(PipelineTest, GuardsSurfaceAsExceptions) {
  SolveOptions opt;
  opt.order = 2;
  EXPECT_THROW(run_solve(testing::corpus("m5_quadratic"), opt), OrderTooSmall);
}

TEST(CompareTest, ParallelMatchesSequentialOrder) {
  const ProblemFile pf = testing::corpus("m5_quadratic");
  SolveOptions base;
  base.certify = false;
  const std::vector<RelaxationVariant> variants = {RelaxationVariant::kBaselinePutinar,
                                                   RelaxationVariant::kJacobianSchmudgen};
  const std::vector<int> orders = {2, 4};
  const CompareTable seq = run_compare(pf, variants, orders, base, 1);
  const CompareTable par = run_compare(pf, variants, orders, base, 4);
  ASSERT_EQ(seq.cells.size(), 4u);
  ASSERT_EQ(par.cells.size(), 4u);
  for (std::size_t i = 0; i < seq.cells.size(); ++i) {
    EXPECT_EQ(seq.cells[i].variant, par.cells[i].variant);
    EXPECT_EQ(seq.cells[i].order, par.cells[i].order);
    EXPECT_EQ(seq.cells[i].report.has_value(), par.cells[i].report.has_value());
    if (seq.cells[i].report) EXPECT_EQ(seq.cells[i].report->bound, par.cells[i].report->bound);
  }
  // The Jacobian variant is not admissible at N = 2; the cell fails alone.
  EXPECT_FALSE(seq.cells[2].report.has_value());
  EXPECT_NE(seq.cells[2].error.find("minimal admissible order is 4"), std::string::npos);
  EXPECT_TRUE(seq.cells[3].report.has_value());

  const auto j = to_json(seq);
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(j["cells"][2]["status"], "failed");
  const std::string md = to_markdown(seq);
  EXPECT_NE(md.find("| baseline-putinar |"), std::string::npos);
  EXPECT_NE(md.find("N = 4"), std::string::npos);
}

TEST(ReportTest, JsonSchema) {
  const RunReport r = run("motzkin_ball", RelaxationVariant::kJacobianSchmudgen, 4);
  const auto j = to_json(r);
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(j["variant"], "jacobian-schmudgen");
  EXPECT_EQ(j["order"], 4);
  EXPECT_TRUE(j["certificate"]["fec"].get<bool>());
  EXPECT_LE(j["dual"].get<double>(), j["primal"].get<double>() + 1e-6);
}

}  // namespace
}  // namespace jacsdp
