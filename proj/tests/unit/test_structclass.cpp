#include "doctest.h"

#include "clawkit/error.hpp"
#include "clawkit/structclass.hpp"

using namespace clawkit;

TEST_CASE("validate_equation") {
  CHECK_NOTHROW(parse_equation("1", "u*p1"));
  CHECK_THROWS_AS(parse_equation("0", "p1"), InvalidEquation);
  CHECK_THROWS_AS(parse_equation("1", "p3"), InvalidEquation);
  CHECK_THROWS_AS(parse_equation("p2", "u"), InvalidEquation);
  CHECK_THROWS_AS(parse_equation("1", "t*u"), InvalidEquation);
  CHECK_THROWS_AS(parse_equation("1", "r*u"), UnknownIdentifier);
  ParamTable pt;
  pt.declare("r");
  CHECK_NOTHROW(parse_equation("1", "r*u*p1", pt));
}

TEST_CASE("K test") {
  CHECK(k_invariant_vanishes(parse_equation("1", "u*p1")));
  CHECK_FALSE(k_invariant_vanishes(parse_equation("1", "p2^2")));
  CHECK(k_invariant_vanishes(parse_equation("p1", "p2^2")));
  // (f q)_x + g q + h with f = u*p1
  CHECK(k_invariant_vanishes(parse_equation("u*p1", "u*p2^2 + p1^2*p2 + x*u*p2 + exp(u)")));
}

TEST_CASE("N test") {
  CHECK(n_invariant_vanishes(parse_equation("1", "u*p1")));
  CHECK(n_invariant_vanishes(parse_equation("p1^(-3)", "-3*p1^(-4)*p2^2")));
  CHECK_FALSE(n_invariant_vanishes(parse_equation("p1", "p2^2")));
  CHECK_THROWS_AS(n_invariant_vanishes(parse_equation("1", "p2^2")), PreconditionViolated);
  // f = p^a satisfies the first relation only for a = 0 or a = -3
  for (int a = -6; a <= 3; ++a) {
    Expr f = pow(Expr(Symbol::p(1)), a);
    Expr g = Expr(Rational(a, 1)) * pow(Expr(Symbol::p(1)), a - 1) * pow(Expr(Symbol::p(2)), 2);
    EvolutionEq eq = validate_equation(f, g);
    REQUIRE(k_invariant_vanishes(eq));
    CHECK(n_invariant_vanishes(eq) == (a == 0 || a == -3));
  }
  // f = x*p^(-3): 4 f_p f_x = -12x p^(-7) but 3 f f_px = -9x p^(-7)
  CHECK_FALSE(n_invariant_vanishes(parse_equation("x*p1^(-3)", "-3*x*p1^(-4)*p2^2")));
  // f = u*p^(-3): both sides of the second relation equal -12u p^(-6)
  CHECK(n_invariant_vanishes(parse_equation("u*p1^(-3)", "-3*u*p1^(-4)*p2^2")));
}

TEST_CASE("structural_report") {
  auto kdv = structural_report(parse_equation("1", "u*p1"));
  CHECK(kdv.k_vanishes);
  REQUIRE(kdv.n_vanishes.has_value());
  CHECK(*kdv.n_vanishes);
  CHECK(kdv.g_quadratic_in_q);
  REQUIRE(kdv.normal_form_detected.has_value());
  CHECK(*kdv.normal_form_detected == kNormalFormTag);
  CHECK(kdv.predicted_obstructions.empty());
  CHECK_FALSE(kdv.linear);

  auto cubic = structural_report(parse_equation("1", "p2^3"));
  CHECK_FALSE(cubic.g_quadratic_in_q);
  CHECK_FALSE(cubic.n_vanishes.has_value());
  CHECK(std::find(cubic.predicted_obstructions.begin(), cubic.predicted_obstructions.end(),
                  std::string(kObstructionQuadraticInQ)) != cubic.predicted_obstructions.end());

  auto sq = structural_report(parse_equation("1", "p2^2"));
  CHECK_FALSE(sq.k_vanishes);
  CHECK_FALSE(sq.n_vanishes.has_value());
  CHECK_FALSE(sq.normal_form_detected.has_value());
  REQUIRE(sq.predicted_obstructions.size() == 1);
  CHECK(sq.predicted_obstructions[0] == kObstructionNoWeightMinusOne);

  CHECK(structural_report(parse_equation("1", "0")).linear);
  CHECK(structural_report(parse_equation("1", "x*p1 + u + exp(x)")).linear);
  CHECK_FALSE(structural_report(parse_equation("1", "exp(u)*p1")).linear);
}
