#include <random>

#include <gtest/gtest.h>

#include "jacsdp/parser.hpp"
#include "jacsdp/problem_file.hpp"
#include "test_util.hpp"

namespace jacsdp {
namespace {

const std::vector<std::string> kVars = {"x1", "x2", "x3"};

TEST(ParserTest, SumOfSquares) {
  const Polynomial p = parse_polynomial("x1^2 + x2^2", kVars);
  EXPECT_EQ(p, Polynomial::variable(3, 0) * Polynomial::variable(3, 0) +
                   Polynomial::variable(3, 1) * Polynomial::variable(3, 1));
}

TEST(ParserTest, MotzkinForm) {
  const Polynomial p = parse_polynomial("x1^4*x2^2+x1^2*x2^4+x3^6-3*x1^2*x2^2*x3^2", kVars);
  EXPECT_EQ(p.num_terms(), 4u);
  EXPECT_EQ(p.coefficient(Monomial({2, 2, 2})), -3);
  EXPECT_EQ(p.degree(), 6);
}

TEST(ParserTest, QuadraticConstraint) {
  const std::vector<std::string> v = {"x1", "x2"};
  const Polynomial p = parse_polynomial("x1^2-5*x1*x2-1", v);
  EXPECT_EQ(p.coefficient(Monomial({1, 1})), -5);
  EXPECT_EQ(p.coefficient(Monomial({0, 0})), -1);
}

TEST(ParserTest, DecimalsAreExact) {
  const Polynomial p = parse_polynomial("0.5*x1 + 1.25", kVars);
  EXPECT_EQ(p.coefficient(Monomial({1, 0, 0})), Rational(1, 2));
  EXPECT_EQ(p.coefficient(Monomial({0, 0, 0})), Rational(5, 4));
  EXPECT_EQ(parse_decimal("5.1926"), Rational(25963, 5000));
}

TEST(ParserTest, ErrorsCarryPositions) {
  try {
    parse_polynomial("x1 + * x2", kVars);
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.position(), 5u);
  }
  EXPECT_THROW(parse_polynomial("x1 + y", kVars), ParseError);
  EXPECT_THROW(parse_polynomial("(x1 + x2", kVars), ParseError);
  EXPECT_THROW(parse_polynomial("x1 / x2", kVars), ParseError);
}

TEST(ParserTest, PrintThenParseIsIdentity) {
  std::mt19937 rng(41);
  for (int i = 0; i < 200; ++i) {
    Polynomial p = testing::random_polynomial(rng, 3, 5, 6);
    Rational scale(1 + static_cast<int>(rng() % 5), 1 + static_cast<int>(rng() % 7));
    scale.canonicalize();
    p *= scale;
    EXPECT_EQ(parse_polynomial(to_string(p, kVars), kVars), p) << to_string(p, kVars);
  }
}

TEST(ProblemFileTest, CorpusRoundTrips) {
  for (const auto& name : testing::corpus_names()) {
    const ProblemFile pf = testing::corpus(name);
    EXPECT_EQ(pf.name, name);
    const ProblemFile again = parse_problem_file(format_problem_file(pf));
    EXPECT_EQ(again.vars, pf.vars);
    EXPECT_EQ(again.problem.objective, pf.problem.objective);
    EXPECT_EQ(again.problem.equalities, pf.problem.equalities);
    EXPECT_EQ(again.problem.inequalities, pf.problem.inequalities);
    EXPECT_EQ(again.order, pf.order);
    EXPECT_EQ(again.optimum, pf.optimum);
  }
}

TEST(ProblemFileTest, ReportsLineNumbers) {
  try {
    parse_problem_file("name: t\nvars: x1\nmin: x1^2 +\n");
    FAIL() << "expected an error";
  } catch (const ProblemFileError& e) {
    EXPECT_EQ(e.line(), 3);
  }
  EXPECT_THROW(parse_problem_file("min: x1\nvars: x1\n"), ProblemFileError);
  EXPECT_THROW(parse_problem_file("vars: x1\nmin: x1\nbogus: 1\n"), ProblemFileError);
}

}  // namespace
}  // namespace jacsdp
