#pragma once

// The flow gamma_t = k_s N of closed plane curves, with geometric monitors.
//
// Conventions: N is the left normal (tangent rotated by +90 degrees), so the
// counterclockwise unit circle has k = +1.

#include <optional>
#include <vector>

namespace clawkit {

struct CurveState {
  std::vector<double> x;
  std::vector<double> y;
  double t = 0.0;

  int size() const noexcept { return static_cast<int>(x.size()); }
};

struct CurvatureProfile {
  std::vector<double> k;
  std::vector<double> k1;  // dk/ds
};

struct MomentSet {
  double length = 0.0;
  double area = 0.0;
  double mx = 0.0;  // integral of x over the enclosed region
  double my = 0.0;
  double m2 = 0.0;  // integral of x^2 + y^2
  bool degenerate = false;
};

/// Samples of (x(theta), y(theta)) at theta_j = 2 pi j / N.
template <class Fx, class Fy>
CurveState sample_curve(Fx&& fx, Fy&& fy, int n);

/// Throws DegenerateTangent when |gamma'| is tiny at some sample.
CurvatureProfile curvature_profile(const CurveState& c);
MomentSet moments(const CurveState& c);

/// max_j |k1^2 + k^4/4 + a2 k^2 + a1 k + a0|.
double self_similar_residual(const CurveState& c, double a0, double a1, double a2);

struct SelfSimilarFit {
  double a0 = 0.0;
  double a1 = 0.0;
  double a2 = 0.0;
  double residual = 0.0;
};
/// Least-squares fit of the coefficients flagged in `free`; the others stay at 0.
SelfSimilarFit fit_self_similar(const CurveState& c, bool fit_a0 = true, bool fit_a1 = true, bool fit_a2 = true);

/// True when two non-adjacent polygon edges cross.
bool self_intersects(const CurveState& c);

struct EvolveOptions {
  int record_every = 0;
  /// Keep samples uniform in arclength; otherwise points move purely normally.
  bool redistribute = true;
  /// Fraction of the explicit RK4 stability limit that dt may use.
  double stability_safety = 0.9;
  bool abort_on_self_intersection = false;
  /// Accept a non-simple initial curve (it is flagged at t = 0).
  bool allow_nonsimple_start = false;
};

struct CurveTrajectory {
  std::vector<CurveState> states;
  bool self_intersection = false;
  std::optional<double> self_intersection_time;
  /// Substeps taken per requested step (the normal-only mode subdivides dt).
  int substeps = 1;
};

CurveTrajectory evolve(const CurveState& c, double T, double dt, const EvolveOptions& opts = {});

/// Largest dt accepted by evolve() with redistribution for this curve.
double stable_dt(const CurveState& c, double safety = 0.9);

/// Resamples a curve uniformly in arclength, starting at the first sample.
CurveState resample_by_arclength(const CurveState& c);

// ------------------------------------------------------------ implementation

template <class Fx, class Fy>
CurveState sample_curve(Fx&& fx, Fy&& fy, int n) {
  CurveState c;
  c.x.resize(static_cast<std::size_t>(n));
  c.y.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    double th = 2.0 * 3.14159265358979323846 * j / n;
    c.x[j] = fx(th);
    c.y[j] = fy(th);
  }
  return c;
}

}  // namespace clawkit

namespace clawkit {

/// Residual of the curvature evolution k_t = k_sss + (3/2) k^2 k_s - c k_s at
/// the middle of three consecutive arclength-uniform states (central
/// difference in time).  The -c k_s term, c = mean(k^2)/2, accounts for the
/// tangential sliding of samples used by evolve().
double curvature_evolution_residual(const CurveState& prev, const CurveState& mid, const CurveState& next);

}  // namespace clawkit
