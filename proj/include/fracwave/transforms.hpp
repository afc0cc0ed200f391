#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fracwave/errors.hpp"
#include "fracwave/grid.hpp"

namespace fracwave {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;
using ModeMask = std::vector<std::uint8_t>;

// Transform convention: the continuum pair
//   F(u)(k) = int u(x) e^{-ikx} dx,   u(x) = (1/2pi) int F(u)(k) e^{ikx} dk
// discretized with the quadrature weights dx = 2L/N and dk = pi/L:
//   u_hat(k_j) = dx * sum_m u(x_m) e^{-i k_j x_m}
//   u(x_m)     = (1/2L) * sum_j u_hat(k_j) e^{i k_j x_m}
// With x_m = -L + m dx the phase e^{i k_j L} = (-1)^{mode} appears as a sign.

namespace detail {

inline void require_length(std::size_t got, const SpectralGrid& grid, const char* what) {
  if (got != grid.size()) {
    throw InvalidArgument(std::string(what) + ": length " + std::to_string(got) +
                          " does not match grid size " + std::to_string(grid.size()));
  }
}

/// Largest |u_hat(k) - conj(u_hat(-k))| over the grid, Nyquist included.
inline double hermitian_defect(std::span<const Complex> spectrum, const SpectralGrid& grid) {
  double defect = 0.0;
  for (std::size_t j = 0; j <= grid.size() / 2; ++j) {
    defect = std::max(defect, std::abs(spectrum[j] - std::conj(spectrum[grid.mirror_index(j)])));
  }
  return defect;
}

inline double max_modulus(std::span<const Complex> spectrum) {
  double m = 0.0;
  for (const auto& c : spectrum) m = std::max(m, std::abs(c));
  return m;
}

// Same as to_spectrum/to_field without validation, writing into caller-owned
// storage. `half` must have N/2 + 1 elements.
inline void forward_into(const SpectralGrid& grid, const double* values, Complex* half, Complex* out) {
  const std::size_t n = grid.size();
  grid.fft().forward(values, half);
  const double dx = grid.dx();
  const auto sign = grid.phase_sign();
  for (std::size_t j = 0; j <= n / 2; ++j) out[j] = dx * sign[j] * half[j];
  for (std::size_t j = n / 2 + 1; j < n; ++j) out[j] = std::conj(out[n - j]);
}

inline void backward_into(const SpectralGrid& grid, const Complex* spectrum, Complex* half, double* out) {
  const std::size_t n = grid.size();
  const auto sign = grid.phase_sign();
  const double scale = grid.parseval_weight();
  // Average each coefficient with its mirror: the projection onto real fields.
  half[0] = scale * Complex(spectrum[0].real(), 0.0);
  for (std::size_t j = 1; j < n / 2; ++j) {
    half[j] = scale * sign[j] * 0.5 * (spectrum[j] + std::conj(spectrum[n - j]));
  }
  half[n / 2] = scale * sign[n / 2] * Complex(spectrum[n / 2].real(), 0.0);
  grid.fft().backward(half, out);
}

}  // namespace detail

/// Quadrature-weighted forward transform of a real field. The output is
/// exactly Hermitian: the negative half is filled by conjugation.
inline Spectrum to_spectrum(std::span<const double> values, const SpectralGrid& grid) {
  detail::require_length(values.size(), grid, "to_spectrum");
  Spectrum half(grid.size() / 2 + 1);
  Spectrum out(grid.size());
  detail::forward_into(grid, values.data(), half.data(), out.data());
  return out;
}

/// Inverse transform to a real field.
///
/// Throws ConsistencyError when the spectrum departs from Hermitian symmetry
/// by more than 1e-12 times its largest modulus; smaller residue is dropped.
inline std::vector<double> to_field(std::span<const Complex> spectrum, const SpectralGrid& grid) {
  detail::require_length(spectrum.size(), grid, "to_field");
  const double defect = detail::hermitian_defect(spectrum, grid);
  const double tol = 1e-12 * detail::max_modulus(spectrum);
  if (defect > tol) {
    throw ConsistencyError("to_field: spectrum is not Hermitian (defect " + std::to_string(defect) +
                           ", tolerance " + std::to_string(tol) + ")");
  }
  Spectrum half(grid.size() / 2 + 1);
  std::vector<double> out(grid.size());
  detail::backward_into(grid, spectrum.data(), half.data(), out.data());
  return out;
}

/// Modes kept by a dealiasing filter: true exactly for |m| <= keep_fraction * N/2.
inline ModeMask dealias_mask(const SpectralGrid& grid, double keep_fraction) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) {
    throw InvalidArgument("dealias keep fraction must lie in (0, 1], got " + std::to_string(keep_fraction));
  }
  const auto cutoff = static_cast<long>(std::floor(keep_fraction * static_cast<double>(grid.size() / 2)));
  ModeMask mask(grid.size());
  const auto modes = grid.modes();
  for (std::size_t j = 0; j < grid.size(); ++j) mask[j] = std::abs(modes[j]) <= cutoff ? 1 : 0;
  return mask;
}

inline constexpr double kTwoThirds = 2.0 / 3.0;

/// A real field sampled on the grid together with its spectrum at one time.
struct FieldState {
  std::vector<double> values;
  Spectrum spectrum;
  double time = 0.0;

  static FieldState from_values(const SpectralGrid& grid, std::vector<double> values, double time = 0.0) {
    FieldState s;
    s.spectrum = to_spectrum(values, grid);
    s.values = std::move(values);
    s.time = time;
    return s;
  }

  static FieldState from_spectrum(const SpectralGrid& grid, Spectrum spectrum, double time = 0.0) {
    FieldState s;
    s.values = to_field(spectrum, grid);
    s.spectrum = std::move(spectrum);
    s.time = time;
    return s;
  }
};

/// Multiply a spectrum by the derivative symbol (ik)^order, with the Nyquist mode zeroed.
inline Spectrum differentiate(std::span<const Complex> spectrum, const SpectralGrid& grid, int order = 1) {
  detail::require_length(spectrum.size(), grid, "differentiate");
  Spectrum out(spectrum.begin(), spectrum.end());
  const auto k = grid.wavenumbers();
  for (std::size_t j = 0; j < grid.size(); ++j) {
    out[j] *= std::pow(Complex(0.0, k[j]), order);
  }
  if (order != 0) out[grid.nyquist_index()] = 0.0;
  return out;
}

}  // namespace fracwave
