#pragma once

#include <complex>
#include <memory>
#include <vector>

namespace clawkit {

/// Real periodic FFT on N points of a domain of length L (FFTW plans, RAII).
class Spectral {
 public:
  Spectral(int n, double length);
  ~Spectral();
  Spectral(const Spectral&) = delete;
  Spectral& operator=(const Spectral&) = delete;
  Spectral(Spectral&&) noexcept;
  Spectral& operator=(Spectral&&) noexcept;

  int size() const noexcept { return n_; }
  int modes() const noexcept { return n_ / 2 + 1; }
  double length() const noexcept { return length_; }
  /// Angular wavenumber of mode j (0..N/2).
  double wavenumber(int j) const noexcept;

  /// Unnormalized forward transform.
  void forward(const std::vector<double>& in, std::vector<std::complex<double>>& out) const;
  /// Inverse transform including the 1/N normalization.
  void inverse(const std::vector<std::complex<double>>& in, std::vector<double>& out) const;

  /// Spectral derivative of the given order; the Nyquist mode is dropped for odd orders.
  std::vector<double> derivative(const std::vector<double>& u, int order) const;
  void derivative_from_modes(const std::vector<std::complex<double>>& uh, int order, std::vector<double>& out) const;
  /// Periodic antiderivative of u - mean(u), with zero mean.
  std::vector<double> antiderivative(const std::vector<double>& u) const;
  /// Trapezoid (spectrally accurate) integral over the period.
  double integral(const std::vector<double>& u) const;

 private:
  struct Plans;
  int n_;
  double length_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace clawkit
