#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "fracwave/grid.hpp"
#include "fracwave/params.hpp"
#include "fracwave/transforms.hpp"

namespace fracwave {

// All integrals are evaluated on the spectrum through Parseval,
//   int f g dx  ~  (1/2L) sum_j f_hat(k_j) conj(g_hat(k_j)),
// because D^{alpha/2} has no pointwise form in physical space.

/// Mass: int u dx, equal to the zero-mode coefficient under the transform convention.
inline double invariant_I0(const FieldState& state, const SpectralGrid& grid) {
  detail::require_length(state.spectrum.size(), grid, "invariant_I0");
  return state.spectrum[0].real();
}

/// int (u + nu D^alpha u) dx. For alpha > 0 the D^alpha term annihilates the
/// zero mode and I1 equals I0 identically.
inline double invariant_I1(const FieldState& state, const SpectralGrid& grid, const EquationParams& params) {
  const double p0 = (*grid.power(params.alpha))[0];
  return (1.0 + params.nu * p0) * invariant_I0(state, grid);
}

/// Energy int (u^2 + nu |D^{alpha/2} u|^2) dx = (1/2L) sum (1 + nu |k|^alpha) |u_hat|^2.
inline double invariant_I2(const FieldState& state, const SpectralGrid& grid, const EquationParams& params) {
  detail::require_length(state.spectrum.size(), grid, "invariant_I2");
  const auto power = grid.power(params.alpha);
  double sum = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    sum += (1.0 + params.nu * (*power)[j]) * std::norm(state.spectrum[j]);
  }
  return grid.parseval_weight() * sum;
}

/// Discrete H^s norm: sqrt((1/2L) sum (1 + k^2)^s |u_hat|^2).
inline double sobolev_norm(const FieldState& state, const SpectralGrid& grid, double s) {
  if (!(s >= 0.0)) throw InvalidArgument("Sobolev index must be >= 0, got " + std::to_string(s));
  detail::require_length(state.spectrum.size(), grid, "sobolev_norm");
  const auto k = grid.wavenumbers();
  double sum = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    sum += std::pow(1.0 + k[j] * k[j], s) * std::norm(state.spectrum[j]);
  }
  return std::sqrt(grid.parseval_weight() * sum);
}

/// Largest spectral modulus among the top decile of |k| (|m| > 0.9 N/2),
/// relative to the overall largest modulus. Zero for the zero field.
inline double tail_indicator(const FieldState& state, const SpectralGrid& grid) {
  detail::require_length(state.spectrum.size(), grid, "tail_indicator");
  const double tail_start = 0.9 * static_cast<double>(grid.size() / 2);
  const auto modes = grid.modes();
  double peak = 0.0;
  double tail = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double a = std::abs(state.spectrum[j]);
    peak = std::max(peak, a);
    if (static_cast<double>(std::abs(modes[j])) > tail_start) tail = std::max(tail, a);
  }
  return peak > 0.0 ? tail / peak : 0.0;
}

inline constexpr double kResolvedTail = 1e-6;

inline double linf_norm(const FieldState& state) {
  double m = 0.0;
  for (double v : state.values) m = std::max(m, std::abs(v));
  return m;
}

struct DiagnosticsRecord {
  double time = 0.0;
  double I0 = 0.0;
  double I1 = 0.0;
  double I2 = 0.0;
  double linf = 0.0;
  double sobolev_index_used = 0.0;
  double sobolev_norm = 0.0;
  double drift_I2 = 0.0;
  double tail_indicator = 0.0;
};

/// Relative change |now - reference| / |reference|; zero when the reference vanishes.
inline double relative_drift(double now, double reference) {
  return reference != 0.0 ? std::abs(now - reference) / std::abs(reference) : std::abs(now);
}

/// Evaluate every diagnostic for `state`; drift is measured against `reference_I2`.
inline DiagnosticsRecord measure(const FieldState& state, const SpectralGrid& grid, const EquationParams& params,
                                 double sobolev_index, double reference_I2) {
  DiagnosticsRecord r;
  r.time = state.time;
  r.I0 = invariant_I0(state, grid);
  r.I1 = invariant_I1(state, grid, params);
  r.I2 = invariant_I2(state, grid, params);
  r.linf = linf_norm(state);
  r.sobolev_index_used = sobolev_index;
  r.sobolev_norm = sobolev_norm(state, grid, sobolev_index);
  r.drift_I2 = relative_drift(r.I2, reference_I2);
  r.tail_indicator = tail_indicator(state, grid);
  return r;
}

inline constexpr const char* kDiagnosticsCsvHeader = "t,I0,I1,I2,drift_I2,linf,sobolev,tail";

/// One CSV row in the fixed column order of kDiagnosticsCsvHeader, 17 significant digits.
inline std::string to_csv_row(const DiagnosticsRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.time, r.I0, r.I1, r.I2,
                r.drift_I2, r.linf, r.sobolev_norm, r.tail_indicator);
  return buf;
}

}  // namespace fracwave
