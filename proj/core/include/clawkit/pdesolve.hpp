#pragma once

// Pseudospectral integration of u_t = u_xxx + g(x,u,u_x,u_xx) on a periodic
// domain, and drift monitoring of conserved integrals along the run.

#include <string>
#include <vector>

#include "clawkit/clawsearch.hpp"
#include "clawkit/structclass.hpp"

namespace clawkit {

struct GridState {
  double L = 0.0;
  int N = 0;
  double t = 0.0;
  std::vector<double> u;
};

/// Grid abscissae x_j = -L/2 + j L/N.
std::vector<double> grid_points(double L, int N);

struct IntegrateOptions {
  /// Store every `record_every`-th step (the initial and final states are always kept).
  int record_every = 0;
  /// Stability bound dt <= stability_constant * L / N.
  double stability_constant = 0.25;
  /// Permit explicit x in g: damping sponge layers near the ends of the domain.
  bool allow_x = false;
  double sponge_fraction = 0.1;
  double sponge_strength = 5.0;
};

struct Trajectory {
  double L = 0.0;
  int N = 0;
  double dt = 0.0;
  std::vector<GridState> states;
  /// Set for sponge runs, whose integrals are not exactly conserved.
  bool indicative = false;
};

Trajectory integrate(const EvolutionEq& eq, const std::vector<double>& u0, double L, double T, double dt,
                     const IntegrateOptions& opts = {});

struct DriftSeries {
  std::string density;
  std::vector<double> values;  // I(t) at each recorded state
  double drift = 0.0;
};

struct DriftReport {
  std::vector<double> times;
  std::vector<DriftSeries> series;
  double max_drift() const;
};

/// Densities must be free of parameters; explicit t is evaluated at the state time.
DriftReport monitor(const Trajectory& traj, const std::vector<Expr>& densities, double scale_floor = 1e-8);
DriftReport monitor(const Trajectory& traj, const std::vector<ConservationLaw>& laws, double scale_floor = 1e-8);

}  // namespace clawkit
