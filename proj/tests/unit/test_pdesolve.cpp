#include "doctest.h"

#include <cmath>
#include <numbers>

#include "clawkit/clawsearch.hpp"
#include "clawkit/error.hpp"
#include "clawkit/jetcalc.hpp"
#include "clawkit/pdesolve.hpp"

using namespace clawkit;

namespace {

double sech2(double z) {
  double c = std::cosh(z);
  return 1.0 / (c * c);
}

std::vector<double> soliton(double kappa, double L, int n, double t) {
  auto x = grid_points(L, n);
  std::vector<double> u(n);
  for (int j = 0; j < n; ++j) u[j] = 12 * kappa * kappa * sech2(kappa * (x[j] + 4 * kappa * kappa * t));
  return u;
}

double soliton_error(int n, double dt, double T) {
  const double L = 80.0, kappa = 0.5;
  auto tr = integrate(parse_equation("1", "u*p1"), soliton(kappa, L, n, 0.0), L, T, dt);
  auto exact = soliton(kappa, L, n, T);
  double e = 0.0;
  for (int j = 0; j < n; ++j) e = std::max(e, std::fabs(tr.states.back().u[j] - exact[j]));
  return e;
}

}  // namespace

TEST_CASE("the travelling sech^2 profile solves the equation exactly") {
  // With w = tanh(z), z = kappa (x + 4 kappa^2 t): u = 12 kappa^2 (1 - w^2) and
  // d/dz acts on polynomials in w as (1 - w^2) d/dw.  Here w is stood in by x.
  const Rational kappa(1, 2);
  const Symbol w = Symbol::x();
  auto dz = [&](const Expr& p) { return (Expr(1) - pow(Expr(w), 2)) * diff(p, w); };
  Expr u = Expr(Rational(12) * kappa * kappa) * (Expr(1) - pow(Expr(w), 2));
  Expr uz = dz(u);
  Expr ut = Expr(Rational(4) * kappa * kappa * kappa) * uz;
  Expr ux = Expr(kappa) * uz;
  Expr uxxx = Expr(kappa * kappa * kappa) * dz(dz(uz));
  CHECK((ut - uxxx - u * ux).is_zero());
}

TEST_CASE("soliton run against the exact translate") {
  const double L = 80.0;
  const int n = 512;
  IntegrateOptions opts;
  opts.record_every = 100;
  auto tr = integrate(parse_equation("1", "u*p1"), soliton(0.5, L, n, 0.0), L, 1.0, 1e-3, opts);
  REQUIRE(tr.states.size() == 11);
  CHECK(tr.states.back().t == doctest::Approx(1.0));
  auto exact = soliton(0.5, L, n, 1.0);
  double err = 0.0;
  for (int j = 0; j < n; ++j) err = std::max(err, std::fabs(tr.states.back().u[j] - exact[j]));
  CHECK(err < 1e-4);

  auto rep = monitor(tr, std::vector<Expr>{parse("u"), parse("u^2"), parse("u^3 - 3*p1^2")});
  REQUIRE(rep.series.size() == 3);
  for (const auto& s : rep.series) {
    CHECK(s.values.size() == tr.states.size());
    CHECK_MESSAGE(s.drift < 1e-6, s.density);
  }
  // The integral of u for this profile is 24 kappa = 12.
  CHECK(rep.series[0].values[0] == doctest::Approx(12.0).epsilon(1e-10));
}

TEST_CASE("fourth-order convergence in dt") {
  std::vector<double> dts{0.025, 0.0125, 0.00625, 0.003125};
  std::vector<double> errs;
  for (double dt : dts) errs.push_back(soliton_error(256, dt, 1.0));
  // Least-squares slope of log(err) against log(dt) over a decade of dt.
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < dts.size(); ++i) mx += std::log(dts[i]), my += std::log(errs[i]);
  mx /= dts.size();
  my /= dts.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < dts.size(); ++i) {
    num += (std::log(dts[i]) - mx) * (std::log(errs[i]) - my);
    den += (std::log(dts[i]) - mx) * (std::log(dts[i]) - mx);
  }
  double order = num / den;
  CHECK(order > 3.5);
  CHECK(order < 4.6);
  for (std::size_t i = 1; i < errs.size(); ++i) CHECK(errs[i] < errs[i - 1]);
}

TEST_CASE("Airy modes rotate exactly") {
  const double L = 2 * std::numbers::pi * 3;
  const int n = 64;
  auto x = grid_points(L, n);
  for (int mode : {1, 4, 9}) {
    const double k = 2 * std::numbers::pi * mode / L;
    std::vector<double> u0(n);
    for (int j = 0; j < n; ++j) u0[j] = std::sin(k * x[j]);
    auto tr = integrate(parse_equation("1", "0"), u0, L, 1.0, 0.01);
    double err = 0.0;
    for (int j = 0; j < n; ++j) err = std::max(err, std::fabs(tr.states.back().u[j] - std::sin(k * x[j] - k * k * k)));
    CHECK_MESSAGE(err < 1e-10, "mode " << mode);
  }
}

TEST_CASE("zero stays zero") {
  for (const char* g : {"u*p1", "u^2*p1/2", "p2^2 + u*p1", "u^3"}) {
    auto tr = integrate(parse_equation("1", g), std::vector<double>(32, 0.0), 10.0, 0.5, 0.01);
    for (const auto& s : tr.states) {
      for (double v : s.u) CHECK(v == 0.0);
    }
    auto rep = monitor(tr, std::vector<Expr>{parse("u")});
    CHECK(rep.series[0].drift == 0.0);
  }
}

TEST_CASE("integral of a total derivative vanishes") {
  const double L = 80.0;
  auto tr = integrate(parse_equation("1", "u*p1"), soliton(0.5, L, 256, 0.0), L, 0.5, 1e-2);
  auto rep = monitor(tr, std::vector<Expr>{parse("p1"), parse("u*p1 + p3")});
  for (const auto& s : rep.series) {
    for (double v : s.values) CHECK(std::fabs(v) < 1e-12);
  }
}

TEST_CASE("drift of every law found decreases under refinement") {
  struct Case {
    const char* g;
    double amplitude;
  };
  for (Case c : {Case{"u*p1", 2.0}, Case{"u^2*p1/2", 1.0}, Case{"-u^2*p1/2", 1.0}}) {
    auto eq = parse_equation("1", c.g);
    std::vector<Expr> densities;
    for (int m = 0; m <= 1; ++m) {
      for (const auto& law : solve_densities(eq, m).laws) {
        if (!law.density.depends_on(Symbol::x())) densities.push_back(law.density);
      }
    }
    REQUIRE(densities.size() >= 2);
    const double L = 20.0;
    auto run = [&](int n, double dt) {
      auto x = grid_points(L, n);
      std::vector<double> u0(n);
      for (int j = 0; j < n; ++j) u0[j] = c.amplitude * sech2(x[j]);
      return monitor(integrate(eq, u0, L, 1.0, dt), densities);
    };
    auto coarse = run(32, 0.01);
    auto fine = run(64, 0.005);
    for (std::size_t i = 0; i < densities.size(); ++i) {
      INFO(c.g << ": " << coarse.series[i].density);
      CHECK((fine.series[i].drift < coarse.series[i].drift || fine.series[i].drift < 1e-12));
    }
  }
}

TEST_CASE("solver preconditions") {
  std::vector<double> u0(64, 0.0);
  CHECK_THROWS_AS(integrate(parse_equation("1", "x*p1"), u0, 10.0, 1.0, 0.01), NonPeriodicEquation);
  CHECK_THROWS_AS(integrate(parse_equation("1", "u*p1"), u0, 10.0, 1.0, 1.0), StabilityBound);
  CHECK_THROWS_AS(integrate(parse_equation("u", "0"), u0, 10.0, 1.0, 0.01), PreconditionViolated);
  CHECK_THROWS_AS(integrate(parse_equation("1", "u*p1"), std::vector<double>(48, 0.0), 10.0, 1.0, 0.01),
                  PreconditionViolated);
  CHECK_THROWS_AS(integrate(parse_equation("1", "u*p1"), std::vector<double>(8, 0.0), 10.0, 1.0, 0.01),
                  PreconditionViolated);
  ParamTable pt;
  pt.declare("a");
  CHECK_THROWS_AS(integrate(parse_equation("1", "a*u*p1", pt), u0, 10.0, 1.0, 0.01), PreconditionViolated);
}

TEST_CASE("blow-up is reported as divergence") {
  std::vector<double> u0(32, 10.0);
  CHECK_THROWS_AS(integrate(parse_equation("1", "u^3"), u0, 10.0, 1.0, 1e-3), Divergence);
}

TEST_CASE("sponge mode runs x-dependent equations and labels them") {
  const double L = 60.0;
  const int n = 256;
  auto x = grid_points(L, n);
  std::vector<double> u0(n);
  for (int j = 0; j < n; ++j) u0[j] = sech2(x[j]);
  IntegrateOptions opts;
  opts.allow_x = true;
  auto tr = integrate(parse_equation("1", "u*p1 + x*p1/10"), u0, L, 0.5, 1e-3, opts);
  CHECK(tr.indicative);
  for (double v : tr.states.back().u) CHECK(std::isfinite(v));
}
