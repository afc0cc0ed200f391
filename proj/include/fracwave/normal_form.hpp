#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fracwave/diagnostics.hpp"
#include "fracwave/errors.hpp"
#include "fracwave/grid.hpp"
#include "fracwave/params.hpp"
#include "fracwave/transforms.hpp"

namespace fracwave {

// Normal form w = u + P(u, u) with
//   F(P(u, u))(k) = int m(k - l, l) u_hat(k - l) u_hat(l) dl,
// where, writing p = k - l, q = l, k = p + q and A(x) = 1 + nu |x|^alpha,
//   m(p, q) = lambda k A(p) A(q)
//             / ( 2 (kappa nu + mu) [ k A(q) (|p|^a - |k|^a) + q A(k) (|q|^a - |p|^a) ] ).
// m is real, symmetric in (p, q), even under (p, q) -> (-p, -q) and singular
// on p = 0, q = 0 and p + q = 0.

namespace detail {

inline double kernel_from_powers(const EquationParams& params, double p, double q, double pa, double qa, double ka) {
  // Fixed argument order makes the computed value exactly symmetric and even.
  if (std::abs(p) > std::abs(q)) {
    std::swap(p, q);
    std::swap(pa, qa);
  }
  const double k = p + q;
  const double ap = 1.0 + params.nu * pa;
  const double aq = 1.0 + params.nu * qa;
  const double ak = 1.0 + params.nu * ka;
  const double bracket = k * aq * (pa - ka) + q * ak * (qa - pa);
  const double denom = 2.0 * (params.kappa * params.nu + params.mu) * bracket;
  if (denom == 0.0) {
    throw SingularPoint("normal-form kernel denominator vanishes at (p, q) = (" + std::to_string(p) + ", " +
                        std::to_string(q) + ")");
  }
  return params.lambda * k * ap * aq / denom;
}

inline bool kernel_degenerate(double p, double q) { return p == 0.0 || q == 0.0 || p + q == 0.0; }

}  // namespace detail

/// Normal-form kernel m(p, q). Throws SingularPoint on the degenerate set.
inline double kernel_m(const EquationParams& params, double p, double q) {
  if (params.kappa * params.nu + params.mu == 0.0) {
    throw InvalidArgument("kappa*nu + mu must be nonzero for the normal-form kernel");
  }
  if (detail::kernel_degenerate(p, q)) {
    throw SingularPoint("kernel evaluated on its singular set at (p, q) = (" + std::to_string(p) + ", " +
                        std::to_string(q) + ")");
  }
  const double a = params.alpha;
  return detail::kernel_from_powers(params, p, q, std::pow(std::abs(p), a), std::pow(std::abs(q), a),
                                    std::pow(std::abs(p + q), a));
}

struct CancellationResidual {
  double sum = 0.0;    // m(k-l, l) l A(k) + m(l-k, k) k A(l)
  double scale = 0.0;  // larger magnitude of the two terms
  double relative() const { return scale > 0.0 ? std::abs(sum) / scale : std::abs(sum); }
};

/// Left-hand side of m(k-l, l) l (1 + nu|k|^a) + m(l-k, k) k (1 + nu|l|^a) = 0,
/// the identity behind the integration-by-parts cancellation in the energy.
inline CancellationResidual cancellation_residual(const EquationParams& params, double k, double l) {
  const double ak = 1.0 + params.nu * std::pow(std::abs(k), params.alpha);
  const double al = 1.0 + params.nu * std::pow(std::abs(l), params.alpha);
  const double first = kernel_m(params, k - l, l) * l * ak;
  const double second = kernel_m(params, l - k, k) * k * al;
  return {first + second, std::max(std::abs(first), std::abs(second))};
}

enum class EnvelopeRegion { UnitDiskInterior, UnitDiskExterior };

struct EnvelopeStats {
  /// |m| over the upper envelope of the region.
  double ratio_min = std::numeric_limits<double>::infinity();
  double ratio_max = 0.0;
  /// |m| over the lower envelope of the region.
  double lower_ratio_min = std::numeric_limits<double>::infinity();
  double lower_ratio_max = 0.0;
  int samples = 0;

  double condition() const { return ratio_max / ratio_min; }
  bool bounded() const {
    return ratio_min > 0.0 && std::isfinite(ratio_max) && std::isfinite(condition());
  }
};

/// Envelope functions of the kernel bounds, as functions of (p, q):
/// e1 = |p|^{1-a}/|q| + |q|^{1-a}/|p|,  e2 = |p|^{1+a}/|q| + |q|^{1+a}/|p|.
/// Inside the unit disk e1 bounds |m| from above and e2 from below; outside
/// the roles swap.
inline double envelope_low_order(double p, double q, double alpha) {
  return std::pow(std::abs(p), 1.0 - alpha) / std::abs(q) + std::pow(std::abs(q), 1.0 - alpha) / std::abs(p);
}
inline double envelope_high_order(double p, double q, double alpha) {
  return std::pow(std::abs(p), 1.0 + alpha) / std::abs(q) + std::pow(std::abs(q), 1.0 + alpha) / std::abs(p);
}

inline constexpr double kEnvelopeAngleGap = 0.05;

/// Sample the kernel against its bound envelopes in polar coordinates
/// p = r cos(theta), q = r sin(theta), with theta kept at least 0.05 (in
/// |sin|, |cos| and |sin + cos|) away from the singular rays and r
/// log-uniform on [1e-3, 1] (interior) or [1, 1e3] (exterior).
inline EnvelopeStats bound_envelope_check(const EquationParams& params, EnvelopeRegion region, int samples,
                                          std::uint64_t seed = 20240601) {
  if (samples < 100) throw InvalidArgument("envelope check needs at least 100 samples");
  params.validate_for_normal_form();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> log_r = region == EnvelopeRegion::UnitDiskInterior
                                                     ? std::uniform_real_distribution<double>(-3.0, 0.0)
                                                     : std::uniform_real_distribution<double>(0.0, 3.0);
  EnvelopeStats stats;
  while (stats.samples < samples) {
    const double theta = angle(rng);
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    if (std::abs(c) < kEnvelopeAngleGap || std::abs(s) < kEnvelopeAngleGap ||
        std::abs(c + s) < kEnvelopeAngleGap) {
      continue;
    }
    const double r = std::pow(10.0, log_r(rng));
    const double p = r * c;
    const double q = r * s;
    const double m = std::abs(kernel_m(params, p, q));
    const double lo = envelope_low_order(p, q, params.alpha);
    const double hi = envelope_high_order(p, q, params.alpha);
    const double upper = region == EnvelopeRegion::UnitDiskInterior ? lo : hi;
    const double lower = region == EnvelopeRegion::UnitDiskInterior ? hi : lo;
    const double ratio = m / upper;
    const double lower_ratio = m / lower;
    stats.ratio_min = std::min(stats.ratio_min, ratio);
    stats.ratio_max = std::max(stats.ratio_max, ratio);
    stats.lower_ratio_min = std::min(stats.lower_ratio_min, lower_ratio);
    stats.lower_ratio_max = std::max(stats.lower_ratio_max, lower_ratio);
    ++stats.samples;
  }
  return stats;
}

inline constexpr std::size_t kMaxPseudoProductSize = 4096;

/// Discrete pseudo-product: F(P)(k_j) = dk * sum_l m(k_j - l, l) u_hat(k_j - l) u_hat(l),
/// summed over grid modes l with k_j - l also a grid mode (no wrap-around).
/// Terms on the kernel's singular set are left out, as is the Nyquist mode,
/// which has no conjugate partner. Cost O(N^2); the sum for each output mode
/// runs in ascending l, so results are deterministic.
inline FieldState pseudo_product(const EquationParams& params, const SpectralGrid& grid, const FieldState& u) {
  params.validate_for_normal_form();
  detail::require_length(u.spectrum.size(), grid, "pseudo_product");
  const std::size_t n = grid.size();
  if (n > kMaxPseudoProductSize) {
    throw CapacityError("pseudo-product is O(N^2) and limited to N <= " + std::to_string(kMaxPseudoProductSize) +
                        ", got N = " + std::to_string(n));
  }
  const double peak = detail::max_modulus(u.spectrum);
  if (std::abs(u.spectrum[0]) > 1e-12 * peak) {
    throw InvalidArgument("pseudo-product requires a zero-mean field (|u_hat(0)| = " +
                          std::to_string(std::abs(u.spectrum[0])) + ")");
  }
  const long half = static_cast<long>(n / 2);
  const double dk = grid.dk();
  // |dk m|^alpha for m = 0 .. N, covering every |p|, |q| and |p + q|.
  std::vector<double> pw(n + 1);
  for (std::size_t m = 0; m <= n; ++m) pw[m] = std::pow(dk * static_cast<double>(m), params.alpha);

  Spectrum out(n);
  for (long mk = -half + 1; mk < half; ++mk) {
    if (mk == 0) continue;
    Complex acc(0.0);
    const long lo = std::max(-half + 1, mk - half + 1);
    const long hi = std::min(half - 1, mk + half - 1);
    for (long ml = lo; ml <= hi; ++ml) {
      const long mp = mk - ml;
      if (ml == 0 || mp == 0) continue;
      const Complex a = u.spectrum[grid.index_of_mode(mp)];
      const Complex b = u.spectrum[grid.index_of_mode(ml)];
      if (a == 0.0 || b == 0.0) continue;
      const double kern = detail::kernel_from_powers(params, dk * static_cast<double>(mp), dk * static_cast<double>(ml),
                                                     pw[std::abs(mp)], pw[std::abs(ml)], pw[std::abs(mk)]);
      acc += kern * a * b;
    }
    out[grid.index_of_mode(mk)] = dk * acc;
  }
  return FieldState::from_spectrum(grid, std::move(out), u.time);
}

struct PartialEnergy {
  double quadratic = 0.0;
  double cross = 0.0;
};

namespace detail {

// n-th partial energy from precomputed spectra of u and P(u, u):
//   quadratic = (1/2L) sum k^{2n} (1 + nu|k|^a) |u_hat|^2
//   cross     = 2 (1/2L) sum k^{2n} (1 + nu|k|^a) Re(u_hat conj(P_hat))
inline PartialEnergy partial_energy_from(const EquationParams& params, const SpectralGrid& grid,
                                         const Spectrum& u_hat, const Spectrum& p_hat, int n) {
  const auto power = grid.power(params.alpha);
  const auto k = grid.wavenumbers();
  PartialEnergy e;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (j == grid.nyquist_index()) continue;
    const double w = std::pow(k[j] * k[j], n) * (1.0 + params.nu * (*power)[j]);
    e.quadratic += w * std::norm(u_hat[j]);
    e.cross += w * (u_hat[j] * std::conj(p_hat[j])).real();
  }
  e.quadratic *= grid.parseval_weight();
  e.cross *= 2.0 * grid.parseval_weight();
  return e;
}

}  // namespace detail

/// E_n = |d^n (1 + nu D^a)^{1/2} u|^2 + 2 < d^n (1 + nu D^a)^{1/2} u, d^n (1 + nu D^a)^{1/2} P(u,u) >.
inline PartialEnergy partial_energy(const EquationParams& params, const SpectralGrid& grid, const FieldState& u,
                                    int n) {
  if (n < 1) throw InvalidArgument("partial energy order must be >= 1");
  const FieldState p = pseudo_product(params, grid, u);
  return detail::partial_energy_from(params, grid, u.spectrum, p.spectrum, n);
}

struct EnergyBreakdown {
  int n_max = 0;
  std::vector<double> quadratic_parts;
  std::vector<double> cross_parts;
  double l2_part = 0.0;
  double total = 0.0;
};

/// Modified energy E^(N) = sum_{n=1..N} E_n + |(1 + nu D^a)^{1/2} u|^2.
inline EnergyBreakdown modified_energy(const EquationParams& params, const SpectralGrid& grid, const FieldState& u,
                                       int n_max) {
  if (n_max < 2) throw InvalidArgument("modified energy order must be >= 2");
  const FieldState p = pseudo_product(params, grid, u);
  EnergyBreakdown out;
  out.n_max = n_max;
  // The n = 0 quadratic weight is 1 + nu|k|^a; the Nyquist mode is kept there.
  const auto power = grid.power(params.alpha);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    out.l2_part += (1.0 + params.nu * (*power)[j]) * std::norm(u.spectrum[j]);
  }
  out.l2_part *= grid.parseval_weight();
  out.total = out.l2_part;
  for (int n = 1; n <= n_max; ++n) {
    const PartialEnergy e = detail::partial_energy_from(params, grid, u.spectrum, p.spectrum, n);
    out.quadratic_parts.push_back(e.quadratic);
    out.cross_parts.push_back(e.cross);
    out.total += e.quadratic + e.cross;
  }
  return out;
}

/// E^(N) / |u|^2_{H^{N + alpha/2}}; close to a constant of order one for small data.
inline double energy_equivalence_ratio(const EquationParams& params, const SpectralGrid& grid, const FieldState& u,
                                       int n_max) {
  const double norm = sobolev_norm(u, grid, static_cast<double>(n_max) + 0.5 * params.alpha);
  return modified_energy(params, grid, u, n_max).total / (norm * norm);
}

}  // namespace fracwave
