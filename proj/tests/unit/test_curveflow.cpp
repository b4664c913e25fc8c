#include "doctest.h"

#include <array>
#include <cmath>
#include <numbers>

#include "clawkit/curveflow.hpp"
#include "clawkit/error.hpp"

using namespace clawkit;

namespace {

constexpr double kPi = std::numbers::pi;

CurveState circle(double r, int n, double cx = 0.0, double cy = 0.0) {
  return sample_curve([&](double th) { return cx + r * std::cos(th); }, [&](double th) { return cy + r * std::sin(th); },
                      n);
}

CurveState ellipse(double a, double b, int n) {
  return sample_curve([&](double th) { return a * std::cos(th); }, [&](double th) { return b * std::sin(th); }, n);
}

CurveState perturbed(int n) {
  return sample_curve([](double th) { return (1 + 0.1 * std::cos(3 * th)) * std::cos(th); },
                      [](double th) { return (1 + 0.1 * std::cos(3 * th)) * std::sin(th); }, n);
}

CurveState reversed(const CurveState& c) {
  CurveState r = c;
  for (int j = 0; j < c.size(); ++j) {
    r.x[j] = c.x[(c.size() - j) % c.size()];
    r.y[j] = c.y[(c.size() - j) % c.size()];
  }
  return r;
}

double rel(double a, double b, double scale) { return std::fabs(a - b) / std::max(std::fabs(a), scale); }

}  // namespace

TEST_CASE("curvature of circles and ellipses") {
  auto p = curvature_profile(circle(2.0, 256));
  for (std::size_t j = 0; j < p.k.size(); ++j) {
    CHECK(std::fabs(p.k[j] - 0.5) < 1e-8);
    CHECK(std::fabs(p.k1[j]) < 1e-8);
  }
  // Closed form for the ellipse: k = ab / (a^2 sin^2 + b^2 cos^2)^(3/2).
  auto e = ellipse(2.0, 1.0, 512);
  auto q = curvature_profile(e);
  CHECK(std::fabs(q.k[0] - 2.0) < 1e-6);
  for (int j = 0; j < 512; j += 37) {
    double th = 2 * kPi * j / 512;
    double want = 2.0 / std::pow(4 * std::sin(th) * std::sin(th) + std::cos(th) * std::cos(th), 1.5);
    CHECK(q.k[j] == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("reversing orientation negates k and keeps dk/ds") {
  auto c = perturbed(128);
  auto p = curvature_profile(c);
  auto r = curvature_profile(reversed(c));
  for (int j = 0; j < 128; ++j) {
    int jr = (128 - j) % 128;
    CHECK(r.k[jr] == doctest::Approx(-p.k[j]).epsilon(1e-9));
    CHECK(r.k1[jr] == doctest::Approx(p.k1[j]).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("degenerate tangents are rejected") {
  // x = cos^3, y = sin^3 has cusps where the tangent vanishes.
  auto astroid = sample_curve([](double th) { return std::pow(std::cos(th), 3); },
                              [](double th) { return std::pow(std::sin(th), 3); }, 64);
  CHECK_THROWS_AS(curvature_profile(astroid), DegenerateTangent);
  CHECK_THROWS_AS(curvature_profile(circle(1.0, 8)), PreconditionViolated);
}

TEST_CASE("moments of circles") {
  auto m = moments(circle(1.0, 128));
  CHECK(m.length == doctest::Approx(2 * kPi).epsilon(1e-12));
  CHECK(m.area == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(std::fabs(m.mx) < 1e-12);
  CHECK(std::fabs(m.my) < 1e-12);
  CHECK(m.m2 == doctest::Approx(kPi / 2).epsilon(1e-12));
  CHECK_FALSE(m.degenerate);

  auto s = moments(circle(1.0, 128, 1.0, 0.0));
  CHECK(s.mx == doctest::Approx(kPi).epsilon(1e-12));
  CHECK(s.m2 == doctest::Approx(1.5 * kPi).epsilon(1e-12));

  auto flat = sample_curve([](double th) { return std::cos(th); }, [](double) { return 0.0; }, 64);
  CHECK(moments(flat).degenerate);
  CHECK(moments(reversed(circle(1.0, 64))).area == doctest::Approx(-kPi));
}

TEST_CASE("moments are invariant under resampling") {
  auto c = perturbed(256);
  auto a = moments(c), b = moments(resample_by_arclength(c));
  CHECK(a.length == doctest::Approx(b.length).epsilon(1e-12));
  CHECK(a.area == doctest::Approx(b.area).epsilon(1e-12));
  CHECK(a.m2 == doctest::Approx(b.m2).epsilon(1e-12));
}

TEST_CASE("self-similar residual") {
  const double R = 1.5;
  auto c = circle(R, 128);
  CHECK(self_similar_residual(c, -1.0 / (4 * std::pow(R, 4)), 0, 0) < 1e-8);
  CHECK(self_similar_residual(c, 0, 0, 0) == doctest::Approx(1.0 / (4 * std::pow(R, 4))).epsilon(1e-8));
  auto fit = fit_self_similar(c, true, false, false);
  CHECK(fit.a0 == doctest::Approx(-1.0 / (4 * std::pow(R, 4))));
  CHECK(fit.residual < 1e-8);

  double previous = 0.0;
  for (int n : {128, 256, 512}) {
    auto f = fit_self_similar(ellipse(2.0, 1.0, n));
    CHECK(f.residual > 1e-2);
    if (previous > 0) CHECK(f.residual == doctest::Approx(previous).epsilon(1e-6));
    previous = f.residual;
  }
}

TEST_CASE("self-intersection sweep") {
  CHECK_FALSE(self_intersects(circle(1.0, 64)));
  auto eight = sample_curve([](double th) { return std::sin(th); }, [](double th) { return std::sin(2 * th); }, 64);
  CHECK(self_intersects(eight));
  CHECK_THROWS_AS(evolve(eight, 0.1, 1e-3), PreconditionViolated);
}

TEST_CASE("circles are stationary") {
  auto c = circle(1.0, 512);
  auto tr = evolve(c, 1.0, 1e-3);
  double d = 0.0;
  for (int j = 0; j < c.size(); ++j) {
    d = std::max(d, std::hypot(tr.states.back().x[j] - c.x[j], tr.states.back().y[j] - c.y[j]));
  }
  CHECK(d < 1e-10);
  CHECK_FALSE(tr.self_intersection);
}

TEST_CASE("moments are conserved and drift shrinks under refinement") {
  auto drift = [](int n, double dt) {
    auto tr = evolve(perturbed(n), 0.5, dt);
    auto a = moments(tr.states.front()), b = moments(tr.states.back());
    const double scale = a.area * a.length / (2 * kPi);
    return std::array<double, 5>{rel(a.length, b.length, 1e-300), rel(a.area, b.area, 1e-300),
                                 rel(a.mx, b.mx, scale), rel(a.my, b.my, scale), rel(a.m2, b.m2, 1e-300)};
  };
  auto coarse = drift(256, 1e-3);
  auto fine = drift(512, 5e-4);
  for (int i = 0; i < 5; ++i) {
    CHECK(coarse[i] < 1e-4);
    CHECK(fine[i] < 1e-4);
    CHECK((fine[i] < coarse[i] || fine[i] < 1e-12));
  }
}

TEST_CASE("tangential redistribution is geometrically inert") {
  auto c = perturbed(64);
  EvolveOptions normal;
  normal.redistribute = false;
  auto a = evolve(c, 0.05, 1e-3, normal);
  auto b = evolve(c, 0.05, 1e-3);
  CHECK(a.substeps > 1);
  auto ma = moments(a.states.back()), mb = moments(b.states.back());
  CHECK(std::fabs(ma.length - mb.length) < 1e-6);
  CHECK(std::fabs(ma.area - mb.area) < 1e-6);
  CHECK(std::fabs(ma.mx - mb.mx) < 1e-6);
  CHECK(std::fabs(ma.my - mb.my) < 1e-6);
  CHECK(std::fabs(ma.m2 - mb.m2) < 1e-6);
}

TEST_CASE("Euclidean invariance") {
  auto c = perturbed(256);
  const double ang = 0.7, tx = 0.3, ty = -1.1;
  auto move = [&](const CurveState& s) {
    CurveState r = s;
    for (int j = 0; j < s.size(); ++j) {
      r.x[j] = std::cos(ang) * s.x[j] - std::sin(ang) * s.y[j] + tx;
      r.y[j] = std::sin(ang) * s.x[j] + std::cos(ang) * s.y[j] + ty;
    }
    return r;
  };
  auto a = move(evolve(c, 0.1, 1e-3).states.back());
  auto b = evolve(move(c), 0.1, 1e-3).states.back();
  double e = 0.0;
  for (int j = 0; j < c.size(); ++j) e = std::max(e, std::hypot(a.x[j] - b.x[j], a.y[j] - b.y[j]));
  CHECK(e < 1e-8);
}

TEST_CASE("curvature follows the mKdV-type evolution") {
  std::vector<double> res;
  for (double dt : {1e-4, 2.5e-5, 6.25e-6}) {
    EvolveOptions opts;
    opts.record_every = 1;
    auto tr = evolve(perturbed(128), 2 * dt, dt, opts);
    REQUIRE(tr.states.size() == 3);
    res.push_back(curvature_evolution_residual(tr.states[0], tr.states[1], tr.states[2]));
  }
  CHECK(res[1] < res[0] / 4);
  CHECK(res[2] < res[1] / 4);
  CHECK(res[2] < 0.05);
}

TEST_CASE("clockwise curves evolve with negative curvature") {
  auto cw = reversed(circle(1.0, 64));
  CHECK(curvature_profile(cw).k[3] == doctest::Approx(-1.0));
  auto tr = evolve(cw, 0.1, 1e-3);
  CHECK(moments(tr.states.back()).area == doctest::Approx(-kPi).epsilon(1e-10));
}

TEST_CASE("evolution preconditions") {
  auto c = perturbed(256);
  CHECK_THROWS_AS(evolve(c, 0.5, 0.05), StabilityBound);
  CHECK(stable_dt(c) > 1e-3);
  CHECK_THROWS_AS(evolve(c, 0.5, -1.0), PreconditionViolated);
  // A curve turning twice around has turning number 2.
  auto twice = sample_curve([](double th) { return std::cos(2 * th) * (2 + std::cos(th)); },
                            [](double th) { return std::sin(2 * th) * (2 + std::cos(th)); }, 128);
  CHECK_THROWS(evolve(twice, 0.01, 1e-4));
}

TEST_CASE("self-intersection is flagged without aborting") {
  auto eight = sample_curve([](double th) { return std::sin(th); }, [](double th) { return 0.5 * std::sin(2 * th); }, 64);
  EvolveOptions opts;
  opts.allow_nonsimple_start = true;
  opts.redistribute = false;
  opts.record_every = 1;
  auto tr = evolve(eight, 0.01, 1e-3, opts);
  CHECK(tr.self_intersection);
  CHECK(*tr.self_intersection_time == 0.0);
  CHECK(tr.states.size() == 11);

  opts.abort_on_self_intersection = true;
  auto stopped = evolve(eight, 0.01, 1e-3, opts);
  CHECK(stopped.states.size() == 1);
}
