#include "clawkit/curveflow.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <limits>
#include <cmath>
#include <complex>
#include <numbers>

#include "clawkit/error.hpp"
#include "clawkit/spectral.hpp"

namespace clawkit {

using cvec = std::vector<std::complex<double>>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace {

void validate(const CurveState& c) {
  const int n = c.size();
  if (static_cast<int>(c.y.size()) != n) throw PreconditionViolated("curve coordinate arrays differ in length");
  if (n < 16 || n % 2 != 0) throw PreconditionViolated("curves need an even number of samples, at least 16");
  for (int j = 0; j < n; ++j) {
    if (!std::isfinite(c.x[j]) || !std::isfinite(c.y[j])) throw Divergence("non-finite curve coordinate");
  }
}

// Trigonometric interpolant of periodic samples on [0, 2 pi).
class TrigSeries {
 public:
  TrigSeries(const Spectral& sp, const std::vector<double>& f) : n_(sp.size()) { sp.forward(f, c_); }

  // Value and first derivative at tau.
  std::pair<double, double> eval(double tau) const {
    const int half = n_ / 2;
    double v = c_[0].real();
    double d = 0.0;
    const std::complex<double> w(std::cos(tau), std::sin(tau));
    std::complex<double> z = w;
    for (int j = 1; j < half; ++j) {
      std::complex<double> term = c_[j] * z;
      v += 2.0 * term.real();
      d += -2.0 * j * term.imag();
      z *= w;
    }
    v += c_[half].real() * std::cos(half * tau);
    return {v / n_, d / n_};
  }

 private:
  int n_;
  cvec c_;
};

struct Geometry {
  std::vector<double> xp, yp, xpp, ypp, speed;
};

Geometry geometry(const Spectral& sp, const CurveState& c) {
  Geometry g;
  g.xp = sp.derivative(c.x, 1);
  g.yp = sp.derivative(c.y, 1);
  g.xpp = sp.derivative(c.x, 2);
  g.ypp = sp.derivative(c.y, 2);
  g.speed.resize(g.xp.size());
  for (std::size_t j = 0; j < g.xp.size(); ++j) g.speed[j] = std::hypot(g.xp[j], g.yp[j]);
  return g;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double a : v) s += a;
  return s / static_cast<double>(v.size());
}

}  // namespace

CurvatureProfile curvature_profile(const CurveState& c) {
  validate(c);
  Spectral sp(c.size(), kTwoPi);
  Geometry g = geometry(sp, c);
  const double scale = mean(g.speed);
  CurvatureProfile p;
  p.k.resize(g.speed.size());
  for (std::size_t j = 0; j < g.speed.size(); ++j) {
    if (!(g.speed[j] > 1e-8 * scale)) throw DegenerateTangent("tangent vanishes at sample " + std::to_string(j));
    p.k[j] = (g.xp[j] * g.ypp[j] - g.yp[j] * g.xpp[j]) / std::pow(g.speed[j], 3);
  }
  p.k1 = sp.derivative(p.k, 1);
  for (std::size_t j = 0; j < p.k1.size(); ++j) p.k1[j] /= g.speed[j];
  return p;
}

MomentSet moments(const CurveState& c) {
  validate(c);
  Spectral sp(c.size(), kTwoPi);
  auto xp = sp.derivative(c.x, 1);
  auto yp = sp.derivative(c.y, 1);
  const double h = kTwoPi / c.size();
  MomentSet m;
  for (int j = 0; j < c.size(); ++j) {
    const double x = c.x[j], y = c.y[j];
    m.length += std::hypot(xp[j], yp[j]) * h;
    m.area += 0.5 * (x * yp[j] - y * xp[j]) * h;
    m.mx += 0.5 * x * x * yp[j] * h;
    m.my += -0.5 * y * y * xp[j] * h;
    m.m2 += (x * x * x * yp[j] - y * y * y * xp[j]) / 3.0 * h;
  }
  m.degenerate = std::fabs(m.area) <= 1e-10 * m.length * m.length;
  return m;
}

double self_similar_residual(const CurveState& c, double a0, double a1, double a2) {
  auto p = curvature_profile(c);
  double r = 0.0;
  for (std::size_t j = 0; j < p.k.size(); ++j) {
    const double k = p.k[j];
    r = std::max(r, std::fabs(p.k1[j] * p.k1[j] + 0.25 * k * k * k * k + a2 * k * k + a1 * k + a0));
  }
  return r;
}

SelfSimilarFit fit_self_similar(const CurveState& c, bool fit_a0, bool fit_a1, bool fit_a2) {
  auto p = curvature_profile(c);
  const int n = static_cast<int>(p.k.size());
  std::vector<int> powers;
  if (fit_a0) powers.push_back(0);
  if (fit_a1) powers.push_back(1);
  if (fit_a2) powers.push_back(2);
  SelfSimilarFit fit;
  if (!powers.empty()) {
    Eigen::MatrixXd A(n, static_cast<Eigen::Index>(powers.size()));
    Eigen::VectorXd b(n);
    for (int j = 0; j < n; ++j) {
      const double k = p.k[j];
      for (std::size_t i = 0; i < powers.size(); ++i) A(j, static_cast<Eigen::Index>(i)) = std::pow(k, powers[i]);
      b(j) = -(p.k1[j] * p.k1[j] + 0.25 * k * k * k * k);
    }
    Eigen::VectorXd sol = A.completeOrthogonalDecomposition().solve(b);
    for (std::size_t i = 0; i < powers.size(); ++i) {
      double v = sol(static_cast<Eigen::Index>(i));
      if (powers[i] == 0) fit.a0 = v;
      if (powers[i] == 1) fit.a1 = v;
      if (powers[i] == 2) fit.a2 = v;
    }
  }
  fit.residual = self_similar_residual(c, fit.a0, fit.a1, fit.a2);
  return fit;
}

bool self_intersects(const CurveState& c) {
  const int n = c.size();
  auto orient = [&](int a, int b, int q) {
    double v = (c.x[b] - c.x[a]) * (c.y[q] - c.y[a]) - (c.y[b] - c.y[a]) * (c.x[q] - c.x[a]);
    return (v > 0) - (v < 0);
  };
  for (int i = 0; i < n; ++i) {
    const int i1 = (i + 1) % n;
    for (int j = i + 2; j < n; ++j) {
      const int j1 = (j + 1) % n;
      if (j1 == i) continue;
      int o1 = orient(i, i1, j), o2 = orient(i, i1, j1);
      int o3 = orient(j, j1, i), o4 = orient(j, j1, i1);
      if (o1 * o2 < 0 && o3 * o4 < 0) return true;
    }
  }
  return false;
}

CurveState resample_by_arclength(const CurveState& c) {
  validate(c);
  const int n = c.size();
  Spectral sp(n, kTwoPi);
  Geometry g = geometry(sp, c);
  const double L = sp.integral(g.speed);
  // s(tau) = L tau / (2 pi) + P(tau) - P(0), P a periodic antiderivative.
  TrigSeries P(sp, sp.antiderivative(g.speed));
  TrigSeries X(sp, c.x), Y(sp, c.y);
  const double p0 = P.eval(0.0).first;
  CurveState out;
  out.t = c.t;
  out.x.resize(static_cast<std::size_t>(n));
  out.y.resize(static_cast<std::size_t>(n));
  double tau = 0.0;
  for (int j = 0; j < n; ++j) {
    const double target = L * j / n;
    if (j > 0) tau += kTwoPi / n;
    for (int it = 0; it < 50; ++it) {
      auto [pv, pd] = P.eval(tau);
      double s = L * tau / kTwoPi + pv - p0;
      double ds = L / kTwoPi + pd;
      if (!(ds > 0)) throw DegenerateTangent("tangent vanishes while resampling");
      double step = (s - target) / ds;
      tau -= step;
      if (std::fabs(step) < 1e-15) break;
    }
    out.x[j] = X.eval(tau).first;
    out.y[j] = Y.eval(tau).first;
  }
  return out;
}

// ------------------------------------------------------------------ evolution

namespace {

// Tangent-angle form: theta(alpha) = n alpha + phi(alpha), uniform speed sigma,
// positions recovered from theta and the mean position.
class AngleFlow {
 public:
  AngleFlow(const CurveState& c0, double dt) : sp_(c0.size(), kTwoPi), n_pts_(c0.size()), dt_(dt) {
    CurveState c = resample_by_arclength(c0);
    Geometry g = geometry(sp_, c);
    sigma_ = sp_.integral(g.speed) / kTwoPi;
    std::vector<double> theta(g.xp.size());
    for (std::size_t j = 0; j < theta.size(); ++j) theta[j] = std::atan2(g.yp[j], g.xp[j]);
    for (std::size_t j = 1; j < theta.size(); ++j) {
      double d = theta[j] - theta[j - 1];
      theta[j] -= kTwoPi * std::round(d / kTwoPi);
    }
    double closing = theta.front() - theta.back();
    double turn = theta.back() - theta.front() + (closing - kTwoPi * std::round(closing / kTwoPi));
    turning_ = static_cast<int>(std::lround(turn / kTwoPi));
    if (turning_ != 1 && turning_ != -1) throw PreconditionViolated("curve must have turning number +1 or -1");
    std::vector<double> phi(theta.size());
    for (std::size_t j = 0; j < phi.size(); ++j) phi[j] = theta[j] - turning_ * alpha(static_cast<int>(j));
    sp_.forward(phi, phih_);
    base_ = {mean(c.x), mean(c.y)};
    t_ = c0.t;

    const std::complex<double> I(0.0, 1.0);
    e_.resize(phih_.size());
    e2_.resize(phih_.size());
    for (int j = 0; j < sp_.modes(); ++j) {
      std::complex<double> lin = std::pow(I * static_cast<double>(j), 3) / std::pow(sigma_, 3);
      if (j == n_pts_ / 2) lin = 0.0;
      e_[j] = std::exp(lin * dt_);
      e2_[j] = std::exp(lin * (0.5 * dt_));
    }
    filter_.resize(phih_.size());
    for (int j = 0; j < sp_.modes(); ++j) {
      double r = static_cast<double>(j) / (n_pts_ / 2);
      filter_[j] = std::exp(-36.0 * std::pow(r, 36));
    }
  }

  double alpha(int j) const { return kTwoPi * j / n_pts_; }

  // Largest stable dt for the explicit part at the current state.
  double stable_dt(double safety) {
    std::vector<double> phia;
    sp_.derivative_from_modes(phih_, 1, phia);
    double c = mean_k2_half(phia);
    double lam = 0.0;
    for (double pa : phia) {
      double ta = turning_ + pa;
      lam = std::max(lam, std::fabs(1.5 * ta * ta / std::pow(sigma_, 3) - c / sigma_));
    }
    lam *= n_pts_ / 2.0;
    return lam > 0 ? safety * 2.0 * std::sqrt(2.0) / lam : std::numeric_limits<double>::infinity();
  }

  void step() {
    const std::size_t m = phih_.size();
    cvec a, b, c, d, tmp(m);
    std::array<double, 2> va, vb, vc, vd;
    rhs(phih_, a, va);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = e2_[j] * (phih_[j] + 0.5 * dt_ * a[j]);
    rhs(tmp, b, vb);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = e2_[j] * phih_[j] + 0.5 * dt_ * b[j];
    rhs(tmp, c, vc);
    for (std::size_t j = 0; j < m; ++j) tmp[j] = e_[j] * phih_[j] + dt_ * e2_[j] * c[j];
    rhs(tmp, d, vd);
    for (std::size_t j = 0; j < m; ++j) {
      phih_[j] = e_[j] * phih_[j] + dt_ / 6.0 * (e_[j] * a[j] + 2.0 * e2_[j] * (b[j] + c[j]) + d[j]);
    }
    for (int i = 0; i < 2; ++i) base_[i] += dt_ / 6.0 * (va[i] + 2.0 * vb[i] + 2.0 * vc[i] + vd[i]);
    t_ += dt_;
  }

  CurveState positions() const {
    std::vector<double> phi;
    sp_.inverse(phih_, phi);
    std::vector<double> cx(phi.size()), cy(phi.size());
    for (std::size_t j = 0; j < phi.size(); ++j) {
      double th = turning_ * alpha(static_cast<int>(j)) + phi[j];
      cx[j] = std::cos(th);
      cy[j] = std::sin(th);
    }
    auto px = sp_.antiderivative(cx);
    auto py = sp_.antiderivative(cy);
    CurveState c;
    c.t = t_;
    c.x.resize(phi.size());
    c.y.resize(phi.size());
    for (std::size_t j = 0; j < phi.size(); ++j) {
      c.x[j] = base_[0] + sigma_ * px[j];
      c.y[j] = base_[1] + sigma_ * py[j];
    }
    for (std::size_t j = 0; j < phi.size(); ++j) {
      if (!std::isfinite(c.x[j]) || !std::isfinite(c.y[j])) {
        throw Divergence("non-finite curve at t = " + std::to_string(t_));
      }
    }
    return c;
  }

 private:
  double mean_k2_half(const std::vector<double>& phia) const {
    double s = 0.0;
    for (double pa : phia) {
      double k = (turning_ + pa) / sigma_;
      s += k * k;
    }
    return 0.5 * s / static_cast<double>(phia.size());
  }

  // phi_t nonlinear part and the mean position velocity.
  void rhs(const cvec& ph, cvec& out, std::array<double, 2>& vbase) {
    std::vector<double> phi, phia, phiaa;
    sp_.inverse(ph, phi);
    sp_.derivative_from_modes(ph, 1, phia);
    sp_.derivative_from_modes(ph, 2, phiaa);
    const double c = mean_k2_half(phia);
    const double s3 = std::pow(sigma_, 3);
    std::vector<double> nl(phia.size());
    for (std::size_t j = 0; j < phia.size(); ++j) {
      double ta = turning_ + phia[j];
      nl[j] = ta * ta * ta / (2.0 * s3) - c * ta / sigma_;
    }
    sp_.forward(nl, out);
    // High-order filter against aliasing of the cubic term.
    for (std::size_t j = 0; j < out.size(); ++j) out[j] *= filter_[j];
    // Velocity of the mean position: average of k_s N + W T over alpha.
    vbase = {0.0, 0.0};
    for (std::size_t j = 0; j < phi.size(); ++j) {
      const double th = turning_ * alpha(static_cast<int>(j)) + phi[j];
      const double k = (turning_ + phia[j]) / sigma_;
      const double v = phiaa[j] / (sigma_ * sigma_);
      const double w = 0.5 * k * k - c;
      vbase[0] += -v * std::sin(th) + w * std::cos(th);
      vbase[1] += v * std::cos(th) + w * std::sin(th);
    }
    vbase[0] /= static_cast<double>(phi.size());
    vbase[1] /= static_cast<double>(phi.size());
  }

  Spectral sp_;
  int n_pts_;
  double dt_;
  double sigma_ = 1.0;
  int turning_ = 1;
  double t_ = 0.0;
  cvec phih_;
  std::array<double, 2> base_{};
  cvec e_, e2_;
  std::vector<double> filter_;
};

// gamma_t = k_s N with no tangential motion, explicit RK4 on the samples.
class NormalFlow {
 public:
  explicit NormalFlow(const CurveState& c) : sp_(c.size(), kTwoPi), c_(c) {}

  double stable_dt(double safety) const {
    Geometry g = geometry(sp_, c_);
    double smin = *std::min_element(g.speed.begin(), g.speed.end());
    double kmax = c_.size() / 2.0;
    return safety * 2.78 * std::pow(smin / kmax, 4);
  }

  void step(double dt) {
    const std::size_t n = c_.x.size();
    std::vector<double> ax, ay, bx, by, cx, cy, dx, dy, tx(n), ty(n);
    velocity(c_.x, c_.y, ax, ay);
    for (std::size_t j = 0; j < n; ++j) tx[j] = c_.x[j] + 0.5 * dt * ax[j], ty[j] = c_.y[j] + 0.5 * dt * ay[j];
    velocity(tx, ty, bx, by);
    for (std::size_t j = 0; j < n; ++j) tx[j] = c_.x[j] + 0.5 * dt * bx[j], ty[j] = c_.y[j] + 0.5 * dt * by[j];
    velocity(tx, ty, cx, cy);
    for (std::size_t j = 0; j < n; ++j) tx[j] = c_.x[j] + dt * cx[j], ty[j] = c_.y[j] + dt * cy[j];
    velocity(tx, ty, dx, dy);
    for (std::size_t j = 0; j < n; ++j) {
      c_.x[j] += dt / 6.0 * (ax[j] + 2.0 * bx[j] + 2.0 * cx[j] + dx[j]);
      c_.y[j] += dt / 6.0 * (ay[j] + 2.0 * by[j] + 2.0 * cy[j] + dy[j]);
    }
    c_.t += dt;
  }

  const CurveState& state() const { return c_; }

 private:
  void velocity(const std::vector<double>& x, const std::vector<double>& y, std::vector<double>& vx,
                std::vector<double>& vy) const {
    auto xp = sp_.derivative(x, 1), yp = sp_.derivative(y, 1);
    auto xpp = sp_.derivative(x, 2), ypp = sp_.derivative(y, 2);
    const std::size_t n = x.size();
    std::vector<double> k(n), sp(n);
    for (std::size_t j = 0; j < n; ++j) {
      sp[j] = std::hypot(xp[j], yp[j]);
      k[j] = (xp[j] * ypp[j] - yp[j] * xpp[j]) / (sp[j] * sp[j] * sp[j]);
    }
    auto kp = sp_.derivative(k, 1);
    vx.resize(n);
    vy.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      double ks = kp[j] / sp[j];
      vx[j] = -ks * yp[j] / sp[j];
      vy[j] = ks * xp[j] / sp[j];
    }
  }

  Spectral sp_;
  CurveState c_;
};

void record(CurveTrajectory& traj, CurveState c) {
  if (!traj.self_intersection && self_intersects(c)) {
    traj.self_intersection = true;
    traj.self_intersection_time = c.t;
  }
  traj.states.push_back(std::move(c));
}

}  // namespace

double stable_dt(const CurveState& c, double safety) {
  validate(c);
  AngleFlow flow(c, 1.0);
  return flow.stable_dt(safety);
}

CurveTrajectory evolve(const CurveState& c, double T, double dt, const EvolveOptions& opts) {
  validate(c);
  if (!(dt > 0) || !(T >= 0)) throw PreconditionViolated("dt must be positive and T nonnegative");
  if (!opts.allow_nonsimple_start && self_intersects(c)) throw PreconditionViolated("initial curve is not simple");
  const long steps = std::lround(T / dt);
  const long every = opts.record_every > 0 ? opts.record_every : std::max<long>(steps, 1);
  CurveTrajectory traj;

  if (opts.redistribute) {
    AngleFlow flow(c, dt);
    double bound = flow.stable_dt(opts.stability_safety);
    if (dt > bound) {
      throw StabilityBound("dt = " + std::to_string(dt) + " exceeds the stability bound " + std::to_string(bound));
    }
    record(traj, flow.positions());
    if (traj.self_intersection && opts.abort_on_self_intersection) return traj;
    for (long s = 1; s <= steps; ++s) {
      flow.step();
      if (s % every == 0 || s == steps) {
        record(traj, flow.positions());
        if (traj.self_intersection && opts.abort_on_self_intersection) break;
      }
    }
    return traj;
  }

  NormalFlow flow(c);
  const double bound = flow.stable_dt(opts.stability_safety);
  const int sub = static_cast<int>(std::ceil(dt / bound));
  traj.substeps = sub;
  record(traj, flow.state());
  if (traj.self_intersection && opts.abort_on_self_intersection) return traj;
  for (long s = 1; s <= steps; ++s) {
    for (int i = 0; i < sub; ++i) flow.step(dt / sub);
    validate(flow.state());
    if (s % every == 0 || s == steps) {
      record(traj, flow.state());
      if (traj.self_intersection && opts.abort_on_self_intersection) break;
    }
  }
  return traj;
}

double curvature_evolution_residual(const CurveState& prev, const CurveState& mid, const CurveState& next) {
  const double dt = 0.5 * (next.t - prev.t);
  if (!(dt > 0)) throw PreconditionViolated("states must be ordered in time");
  auto kp = curvature_profile(prev).k;
  auto kn = curvature_profile(next).k;
  auto prof = curvature_profile(mid);
  Spectral sp(mid.size(), kTwoPi);
  Geometry g = geometry(sp, mid);
  auto ds = [&](const std::vector<double>& f) {
    auto d = sp.derivative(f, 1);
    for (std::size_t j = 0; j < d.size(); ++j) d[j] /= g.speed[j];
    return d;
  };
  const auto& k = prof.k;
  const auto& ks = prof.k1;
  auto kss = ds(ks);
  auto ksss = ds(kss);
  double c = 0.0;
  for (double v : k) c += v * v;
  c *= 0.5 / static_cast<double>(k.size());
  double r = 0.0;
  for (std::size_t j = 0; j < k.size(); ++j) {
    double kt = (kn[j] - kp[j]) / (2.0 * dt);
    r = std::max(r, std::fabs(kt - (ksss[j] + 1.5 * k[j] * k[j] * ks[j] - c * ks[j])));
  }
  return r;
}

}  // namespace clawkit
