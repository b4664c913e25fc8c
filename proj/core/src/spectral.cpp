#include "clawkit/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>

#include "clawkit/error.hpp"

namespace clawkit {

namespace {

// FFTW planning is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex mu;
  return mu;
}

}  // namespace

struct Spectral::Plans {
  double* real = nullptr;
  fftw_complex* cplx = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  Plans(int n) {
    std::lock_guard lock(planner_mutex());
    real = fftw_alloc_real(static_cast<std::size_t>(n));
    cplx = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
    fwd = fftw_plan_dft_r2c_1d(n, real, cplx, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(n, cplx, real, FFTW_ESTIMATE);
  }
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(cplx);
  }
};

Spectral::Spectral(int n, double length) : n_(n), length_(length) {
  if (n < 4 || n % 2 != 0) throw NumericError("spectral grid size must be even and >= 4");
  if (!(length > 0)) throw NumericError("domain length must be positive");
  plans_ = std::make_unique<Plans>(n);
}

Spectral::~Spectral() = default;
Spectral::Spectral(Spectral&&) noexcept = default;
Spectral& Spectral::operator=(Spectral&&) noexcept = default;

double Spectral::wavenumber(int j) const noexcept { return 2.0 * std::numbers::pi * j / length_; }

void Spectral::forward(const std::vector<double>& in, std::vector<std::complex<double>>& out) const {
  std::copy(in.begin(), in.end(), plans_->real);
  fftw_execute(plans_->fwd);
  out.resize(static_cast<std::size_t>(modes()));
  for (int j = 0; j < modes(); ++j) out[j] = {plans_->cplx[j][0], plans_->cplx[j][1]};
}

void Spectral::inverse(const std::vector<std::complex<double>>& in, std::vector<double>& out) const {
  for (int j = 0; j < modes(); ++j) {
    plans_->cplx[j][0] = in[j].real();
    plans_->cplx[j][1] = in[j].imag();
  }
  fftw_execute(plans_->inv);
  out.resize(static_cast<std::size_t>(n_));
  const double scale = 1.0 / n_;
  for (int i = 0; i < n_; ++i) out[i] = plans_->real[i] * scale;
}

void Spectral::derivative_from_modes(const std::vector<std::complex<double>>& uh, int order,
                                     std::vector<double>& out) const {
  std::vector<std::complex<double>> d(uh.size());
  const std::complex<double> I(0.0, 1.0);
  for (int j = 0; j < modes(); ++j) {
    std::complex<double> f = std::pow(I * wavenumber(j), order);
    d[j] = f * uh[j];
  }
  if (order % 2 == 1) d[n_ / 2] = 0.0;
  inverse(d, out);
}

std::vector<double> Spectral::derivative(const std::vector<double>& u, int order) const {
  std::vector<std::complex<double>> uh;
  forward(u, uh);
  std::vector<double> out;
  derivative_from_modes(uh, order, out);
  return out;
}

std::vector<double> Spectral::antiderivative(const std::vector<double>& u) const {
  std::vector<std::complex<double>> uh;
  forward(u, uh);
  const std::complex<double> I(0.0, 1.0);
  uh[0] = 0.0;
  for (int j = 1; j < modes(); ++j) uh[j] /= I * wavenumber(j);
  uh[n_ / 2] = 0.0;
  std::vector<double> out;
  inverse(uh, out);
  return out;
}

double Spectral::integral(const std::vector<double>& u) const {
  return std::accumulate(u.begin(), u.end(), 0.0) * length_ / n_;
}

}  // namespace clawkit
