#include "clawkit/pdesolve.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "clawkit/error.hpp"
#include "clawkit/numeric.hpp"
#include "clawkit/spectral.hpp"

namespace clawkit {

using cvec = std::vector<std::complex<double>>;

std::vector<double> grid_points(double L, int N) {
  std::vector<double> x(static_cast<std::size_t>(N));
  for (int j = 0; j < N; ++j) x[j] = -0.5 * L + L * j / N;
  return x;
}

double DriftReport::max_drift() const {
  double m = 0.0;
  for (const auto& s : series) m = std::max(m, s.drift);
  return m;
}

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void check_finite(const std::vector<double>& u, double t) {
  for (double v : u) {
    if (!std::isfinite(v)) throw Divergence("non-finite sample at t = " + std::to_string(t));
  }
}

// Jets u, u_x, ..., u_x^k on the grid from the spectrum.
void jets_from_modes(const Spectral& sp, const cvec& uh, int order, std::vector<std::vector<double>>& jets) {
  jets.resize(static_cast<std::size_t>(order + 1));
  sp.inverse(uh, jets[0]);
  for (int i = 1; i <= order; ++i) sp.derivative_from_modes(uh, i, jets[i]);
}

class Stepper {
 public:
  Stepper(const Expr& g, double L, int N, double dt, std::vector<double> damping)
      : sp_(N, L), g_(g), x_(grid_points(L, N)), dt_(dt), damping_(std::move(damping)) {
    order_ = std::max(g_.jet_order(), 0);
    const std::complex<double> I(0.0, 1.0);
    e_.resize(static_cast<std::size_t>(sp_.modes()));
    e2_.resize(e_.size());
    for (int j = 0; j < sp_.modes(); ++j) {
      double k = sp_.wavenumber(j);
      std::complex<double> lin = std::pow(I * k, 3);
      if (j == N / 2) lin = 0.0;
      e_[j] = std::exp(lin * dt);
      e2_[j] = std::exp(lin * (0.5 * dt));
    }
  }

  const Spectral& spectral() const { return sp_; }

  // Spectrum of g(x, u, u_x, ...) minus the sponge term.
  void nonlinear(const cvec& uh, double t, cvec& out) {
    jets_from_modes(sp_, uh, order_, jets_);
    g_.evaluate(t, x_, jets_, buf_);
    if (!damping_.empty()) {
      for (std::size_t j = 0; j < buf_.size(); ++j) buf_[j] -= damping_[j] * jets_[0][j];
    }
    sp_.forward(buf_, out);
  }

  void step(cvec& uh, double t) {
    const std::size_t m = uh.size();
    cvec a, b, c, d, tmp(m);
    nonlinear(uh, t, a);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = e2_[j] * (uh[j] + 0.5 * dt_ * a[j]);
    nonlinear(tmp, t + 0.5 * dt_, b);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = e2_[j] * uh[j] + 0.5 * dt_ * b[j];
    nonlinear(tmp, t + 0.5 * dt_, c);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = e_[j] * uh[j] + dt_ * e2_[j] * c[j];
    nonlinear(tmp, t + dt_, d);
    for (std::size_t j = 0; j < m; ++j) {
      uh[j] = e_[j] * uh[j] + dt_ / 6.0 * (e_[j] * a[j] + 2.0 * e2_[j] * (b[j] + c[j]) + d[j]);
    }
  }

 private:
  Spectral sp_;
  CompiledExpr g_;
  std::vector<double> x_;
  double dt_;
  std::vector<double> damping_;
  int order_ = 0;
  cvec e_, e2_;
  std::vector<std::vector<double>> jets_;
  std::vector<double> buf_;
};

std::vector<double> sponge_profile(double L, int N, double fraction, double strength) {
  std::vector<double> s(static_cast<std::size_t>(N), 0.0);
  const double width = fraction * L;
  auto x = grid_points(L, N);
  for (int j = 0; j < N; ++j) {
    double dist = 0.5 * L - std::fabs(x[j]);
    if (dist < width) {
      double r = 1.0 - dist / width;
      s[j] = strength * r * r;
    }
  }
  return s;
}

}  // namespace

Trajectory integrate(const EvolutionEq& eq, const std::vector<double>& u0, double L, double T, double dt,
                     const IntegrateOptions& opts) {
  const int N = static_cast<int>(u0.size());
  if (N < 16 || !power_of_two(N)) throw PreconditionViolated("grid size must be a power of two and at least 16");
  if (!(L > 0) || !(T >= 0) || !(dt > 0)) throw PreconditionViolated("L and dt must be positive, T nonnegative");
  Expr rhs_f = substitute(eq.f, eq.params);
  auto fval = rhs_f.constant_value();
  if (!fval || *fval != 1) throw PreconditionViolated("numerical integration requires f = 1");
  Expr g = substitute(eq.g, eq.params);
  if (!g.symbols().empty()) {
    for (const auto& s : g.symbols()) {
      if (s.is_param()) throw PreconditionViolated("parameter " + s.param_name() + " is not bound");
    }
  }
  if (g.depends_on(Symbol::t())) throw PreconditionViolated("g must not depend on t");
  if (g.jet_order() > 2) throw PreconditionViolated("g may depend on derivatives up to u_xx only");
  bool x_dependent = g.depends_on(Symbol::x());
  if (x_dependent && !opts.allow_x) {
    throw NonPeriodicEquation("g depends explicitly on x; enable the sponge mode to integrate it");
  }
  const double bound = opts.stability_constant * L / N;
  if (dt > bound) {
    throw StabilityBound("dt = " + std::to_string(dt) + " exceeds the stability bound " + std::to_string(bound));
  }
  check_finite(u0, 0.0);

  std::vector<double> damping;
  if (opts.allow_x) damping = sponge_profile(L, N, opts.sponge_fraction, opts.sponge_strength);
  Stepper stepper(g, L, N, dt, std::move(damping));

  Trajectory traj;
  traj.L = L;
  traj.N = N;
  traj.dt = dt;
  traj.indicative = opts.allow_x;
  traj.states.push_back(GridState{L, N, 0.0, u0});

  const long steps = std::lround(T / dt);
  const int every = opts.record_every > 0 ? opts.record_every : static_cast<int>(std::max<long>(steps, 1));
  cvec uh;
  stepper.spectral().forward(u0, uh);
  std::vector<double> u;
  for (long s = 1; s <= steps; ++s) {
    double t0 = (s - 1) * dt;
    stepper.step(uh, t0);
    if (s % every == 0 || s == steps) {
      stepper.spectral().inverse(uh, u);
      check_finite(u, s * dt);
      traj.states.push_back(GridState{L, N, s * dt, u});
    } else if (s % 64 == 0) {
      for (const auto& z : uh) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
          throw Divergence("non-finite spectrum at t = " + std::to_string(s * dt));
        }
      }
    }
  }
  return traj;
}

DriftReport monitor(const Trajectory& traj, const std::vector<Expr>& densities, double scale_floor) {
  DriftReport rep;
  if (traj.states.empty()) return rep;
  Spectral sp(traj.N, traj.L);
  auto x = grid_points(traj.L, traj.N);
  std::vector<CompiledExpr> compiled;
  int order = 0;
  for (const auto& rho : densities) {
    compiled.emplace_back(rho);
    order = std::max(order, rho.jet_order());
    rep.series.push_back(DriftSeries{print(rho), {}, 0.0});
  }
  std::vector<std::vector<double>> jets;
  std::vector<double> vals;
  cvec uh;
  for (const auto& st : traj.states) {
    rep.times.push_back(st.t);
    sp.forward(st.u, uh);
    jets_from_modes(sp, uh, order, jets);
    for (std::size_t i = 0; i < compiled.size(); ++i) {
      compiled[i].evaluate(st.t, x, jets, vals);
      double integral = sp.integral(vals);
      if (!std::isfinite(integral)) throw NumericError("density " + rep.series[i].density + " overflowed");
      rep.series[i].values.push_back(integral);
    }
  }
  for (auto& s : rep.series) {
    double i0 = s.values.front();
    double dev = 0.0;
    for (double v : s.values) dev = std::max(dev, std::fabs(v - i0));
    s.drift = dev / std::max(std::fabs(i0), scale_floor);
  }
  return rep;
}

DriftReport monitor(const Trajectory& traj, const std::vector<ConservationLaw>& laws, double scale_floor) {
  std::vector<Expr> dens;
  dens.reserve(laws.size());
  for (const auto& l : laws) dens.push_back(l.density);
  return monitor(traj, dens, scale_floor);
}

}  // namespace clawkit
