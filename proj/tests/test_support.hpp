#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "fracwave/grid.hpp"
#include "fracwave/transforms.hpp"

namespace fracwave::test {

inline double l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

inline double l2_diff(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline double spectral_l2_diff(std::span<const Complex> a, std::span<const Complex> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

inline double spectral_l2(std::span<const Complex> a) {
  double s = 0.0;
  for (const auto& c : a) s += std::norm(c);
  return std::sqrt(s);
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline std::vector<double> random_field(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

/// Field whose spectrum is the given mode pairs, coefficients c at +m and conj(c) at -m.
inline FieldState mode_field(const SpectralGrid& grid, const std::vector<std::pair<long, Complex>>& modes) {
  Spectrum s(grid.size());
  for (const auto& [m, c] : modes) {
    s[grid.index_of_mode(m)] = c;
    s[grid.index_of_mode(-m)] = std::conj(c);
  }
  return FieldState::from_spectrum(grid, std::move(s));
}

}  // namespace fracwave::test
