#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fracwave/detail/fftw.hpp"
#include "fracwave/errors.hpp"
#include "fracwave/params.hpp"

namespace fracwave {

/// Uniform periodic discretization of [-L, L) with N nodes.
///
/// Wavenumbers are stored in the standard FFT layout: index j holds integer
/// mode m = j for j < N/2 and m = j - N otherwise, so index N/2 is the
/// Nyquist mode m = -N/2, and k_j = pi m / L. Every multiplier array in the
/// library uses the same layout.
///
/// A grid is immutable. Copies share the FFT plans and the cache of
/// fractional multipliers, which is internally synchronized, so a grid may be
/// used from several threads at once.
class SpectralGrid {
 public:
  SpectralGrid(double half_length, std::size_t num_points) {
    if (!(half_length > 0.0) || !std::isfinite(half_length)) {
      throw InvalidArgument("grid half-length must be positive, got " + std::to_string(half_length));
    }
    if (num_points < 8 || (num_points & (num_points - 1)) != 0) {
      throw InvalidArgument("grid size must be a power of two >= 8, got " + std::to_string(num_points));
    }
    auto s = std::make_shared<Shared>(num_points);
    s->half_length = half_length;
    s->n = num_points;
    s->nodes.resize(num_points);
    s->wavenumbers.resize(num_points);
    s->modes.resize(num_points);
    s->phase_sign.resize(num_points);
    const double spacing = 2.0 * half_length / static_cast<double>(num_points);
    const auto n = static_cast<long>(num_points);
    for (long j = 0; j < n; ++j) {
      s->nodes[j] = -half_length + spacing * static_cast<double>(j);
      const long m = j < n / 2 ? j : j - n;
      s->modes[j] = m;
      s->wavenumbers[j] = std::numbers::pi * static_cast<double>(m) / half_length;
      s->phase_sign[j] = (m % 2 == 0) ? 1.0 : -1.0;
    }
    shared_ = std::move(s);
  }

  double half_length() const { return shared_->half_length; }
  double period() const { return 2.0 * shared_->half_length; }
  std::size_t size() const { return shared_->n; }
  /// Quadrature weight in physical space.
  double dx() const { return period() / static_cast<double>(size()); }
  /// Lattice spacing in wavenumber space.
  double dk() const { return std::numbers::pi / shared_->half_length; }
  /// Parseval weight dk / (2 pi) = 1 / (2L).
  double parseval_weight() const { return 1.0 / period(); }

  std::span<const double> nodes() const { return shared_->nodes; }
  std::span<const double> wavenumbers() const { return shared_->wavenumbers; }
  std::span<const long> modes() const { return shared_->modes; }
  std::size_t nyquist_index() const { return size() / 2; }
  /// Index holding integer mode m, for -N/2 <= m < N/2.
  std::size_t index_of_mode(long m) const {
    const auto n = static_cast<long>(size());
    return static_cast<std::size_t>(m >= 0 ? m : m + n);
  }
  /// Index of the conjugate partner -k_j (the Nyquist index maps to itself).
  std::size_t mirror_index(std::size_t j) const { return (size() - j) % size(); }
  double max_abs_wavenumber() const { return std::numbers::pi * static_cast<double>(size() / 2) / half_length(); }

  /// (-1)^m, the phase e^{i k_j L} relating the node origin -L to x = 0.
  std::span<const double> phase_sign() const { return shared_->phase_sign; }

  const detail::RealFftPlans& fft() const { return shared_->plans; }

  /// |k_j|^alpha, computed once per alpha and cached.
  std::shared_ptr<const std::vector<double>> power(double alpha) const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
      throw InvalidArgument("fractional order must be >= 0, got " + std::to_string(alpha));
    }
    std::lock_guard lock(shared_->cache_mutex);
    auto& slot = shared_->power_cache[alpha];
    if (!slot) {
      auto values = std::make_shared<std::vector<double>>(size());
      for (std::size_t j = 0; j < size(); ++j) {
        const double k = std::abs(shared_->wavenumbers[j]);
        (*values)[j] = alpha == 0.0 ? 1.0 : std::pow(k, alpha);
      }
      slot = std::move(values);
    }
    return slot;
  }

 private:
  struct Shared {
    explicit Shared(std::size_t n) : plans(n) {}
    double half_length = 0.0;
    std::size_t n = 0;
    std::vector<double> nodes;
    std::vector<double> wavenumbers;
    std::vector<long> modes;
    std::vector<double> phase_sign;
    detail::RealFftPlans plans;
    std::mutex cache_mutex;
    std::map<double, std::shared_ptr<const std::vector<double>>> power_cache;
  };
  std::shared_ptr<Shared> shared_;
};

inline SpectralGrid make_grid(double half_length, std::size_t num_points) {
  return SpectralGrid(half_length, num_points);
}

/// Symbol |k|^alpha of D^alpha; the zero mode gives 0 for alpha > 0 and 1 for alpha = 0.
inline std::vector<double> frac_multiplier(const SpectralGrid& grid, double alpha) {
  return *grid.power(alpha);
}

/// Linear dispersion relation omega(k) = k (kappa - mu |k|^alpha) / (1 + nu |k|^alpha),
/// so that the linearized flow is d/dt u_hat = -i omega u_hat.
///
/// The Nyquist entry is zero, which keeps the symbol odd on the grid.
/// Only nu >= 0 is required here so the classical KdV symbol (nu = 0) can be
/// inspected; the evolution code rejects nu = 0 separately.
inline std::vector<double> dispersion_symbol(const EquationParams& params, const SpectralGrid& grid) {
  if (!(params.nu >= 0.0)) throw InvalidArgument("nu must be nonnegative");
  const auto power = grid.power(params.alpha);
  const auto k = grid.wavenumbers();
  std::vector<double> omega(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (j == grid.nyquist_index()) continue;
    const double p = (*power)[j];
    omega[j] = k[j] * (params.kappa - params.mu * p) / (1.0 + params.nu * p);
  }
  return omega;
}

}  // namespace fracwave
