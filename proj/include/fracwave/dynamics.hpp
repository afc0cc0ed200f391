#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "fracwave/diagnostics.hpp"
#include "fracwave/errors.hpp"
#include "fracwave/grid.hpp"
#include "fracwave/params.hpp"
#include "fracwave/transforms.hpp"

namespace fracwave {

// Semidiscrete system, solved for the time derivative:
//   d/dt u_hat = [ -i k (kappa - mu |k|^alpha) u_hat - i k (lambda/2) F(u^2) ] / (1 + nu |k|^alpha)
// The nonlinear product is formed pseudospectrally. With dealiasing on, the
// 2/3 rule is applied to the field entering the product and to the product.

namespace detail {

/// Owns the multipliers and scratch buffers for repeated right-hand-side
/// evaluations on one grid. Not shareable between threads; make one per
/// evolution.
class RhsEvaluator {
 public:
  RhsEvaluator(const EquationParams& params, const SpectralGrid& grid, bool dealias)
      : grid_(grid), dealias_(dealias) {
    const std::size_t n = grid.size();
    const auto omega = dispersion_symbol(params, grid);
    const auto power = grid.power(params.alpha);
    const auto k = grid.wavenumbers();
    linear_.resize(n);
    nonlinear_.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      linear_[j] = Complex(0.0, -omega[j]);
      nonlinear_[j] = Complex(0.0, -k[j] * 0.5 * params.lambda / (1.0 + params.nu * (*power)[j]));
    }
    nonlinear_[grid.nyquist_index()] = 0.0;
    if (dealias_) {
      mask_ = dealias_mask(grid, kTwoThirds);
      for (std::size_t j = 0; j < n; ++j) {
        if (!mask_[j]) nonlinear_[j] = 0.0;
      }
    }
    half_.resize(n / 2 + 1);
    masked_.resize(n);
    field_.resize(n);
    product_.resize(n);
  }

  /// out = d/dt u_hat. `time` only labels a NumericalOverflow.
  void operator()(const Complex* in, Complex* out, double time = 0.0) {
    const std::size_t n = grid_.size();
    const Complex* source = in;
    if (dealias_) {
      for (std::size_t j = 0; j < n; ++j) masked_[j] = mask_[j] ? in[j] : Complex(0.0);
      source = masked_.data();
    }
    backward_into(grid_, source, half_.data(), field_.data());
    bool finite = true;
    for (std::size_t j = 0; j < n; ++j) {
      field_[j] *= field_[j];
      finite = finite && std::isfinite(field_[j]);
    }
    if (!finite) {
      throw NumericalOverflow("non-finite value in the nonlinear product at t = " + std::to_string(time), time);
    }
    forward_into(grid_, field_.data(), half_.data(), product_.data());
    for (std::size_t j = 0; j < n; ++j) out[j] = linear_[j] * in[j] + nonlinear_[j] * product_[j];
  }

  const SpectralGrid& grid() const { return grid_; }

 private:
  SpectralGrid grid_;
  bool dealias_;
  ModeMask mask_;
  Spectrum linear_;
  Spectrum nonlinear_;
  Spectrum half_;
  Spectrum masked_;
  std::vector<double> field_;
  Spectrum product_;
};

/// Classical four-stage RK4 in spectral space, reusing its stage buffers.
class Rk4Stepper {
 public:
  Rk4Stepper(const EquationParams& params, const SpectralGrid& grid, bool dealias)
      : rhs_(params, grid, dealias), k1_(grid.size()), k2_(grid.size()), k3_(grid.size()), k4_(grid.size()),
        stage_(grid.size()) {}

  void step(Spectrum& u, double time, double dt) {
    const std::size_t n = u.size();
    rhs_(u.data(), k1_.data(), time);
    for (std::size_t j = 0; j < n; ++j) stage_[j] = u[j] + 0.5 * dt * k1_[j];
    rhs_(stage_.data(), k2_.data(), time + 0.5 * dt);
    for (std::size_t j = 0; j < n; ++j) stage_[j] = u[j] + 0.5 * dt * k2_[j];
    rhs_(stage_.data(), k3_.data(), time + 0.5 * dt);
    for (std::size_t j = 0; j < n; ++j) stage_[j] = u[j] + dt * k3_[j];
    rhs_(stage_.data(), k4_.data(), time + dt);
    const double w = dt / 6.0;
    for (std::size_t j = 0; j < n; ++j) u[j] += w * (k1_[j] + 2.0 * k2_[j] + 2.0 * k3_[j] + k4_[j]);
  }

 private:
  RhsEvaluator rhs_;
  Spectrum k1_, k2_, k3_, k4_, stage_;
};

}  // namespace detail

/// Time derivative of the spectrum under the full equation.
inline Spectrum rhs(const EquationParams& params, const SpectralGrid& grid, std::span<const Complex> spectrum,
                    bool dealias) {
  params.validate();
  detail::require_length(spectrum.size(), grid, "rhs");
  if (detail::hermitian_defect(spectrum, grid) > 1e-12 * detail::max_modulus(spectrum)) {
    throw ConsistencyError("rhs: spectrum is not Hermitian");
  }
  detail::RhsEvaluator eval(params, grid, dealias);
  Spectrum out(grid.size());
  eval(spectrum.data(), out.data());
  return out;
}

/// One classical RK4 step of size dt.
inline FieldState rk4_step(const EquationParams& params, const SpectralGrid& grid, const FieldState& state,
                           double dt, bool dealias) {
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  params.validate();
  detail::require_length(state.spectrum.size(), grid, "rk4_step");
  detail::Rk4Stepper stepper(params, grid, dealias);
  Spectrum u = state.spectrum;
  stepper.step(u, state.time, dt);
  return FieldState::from_spectrum(grid, std::move(u), state.time + dt);
}

inline constexpr double kRk4StabilityLimit = 2.8;
inline constexpr double kDefaultSafety = 0.5;
inline constexpr double kFallbackDt = 1e-2;

/// Largest step keeping every linear mode inside the RK4 stability region
/// along the imaginary axis: safety * 2.8 / max |omega(k)|.
inline double stable_dt(const EquationParams& params, const SpectralGrid& grid, double safety = kDefaultSafety) {
  if (!(safety > 0.0 && safety <= 1.0)) {
    throw InvalidArgument("safety factor must lie in (0, 1], got " + std::to_string(safety));
  }
  const auto omega = dispersion_symbol(params, grid);
  double peak = 0.0;
  for (double w : omega) peak = std::max(peak, std::abs(w));
  if (!(peak > 0.0)) return kFallbackDt;
  return safety * kRk4StabilityLimit / peak;
}

/// Exact solution of the linear (lambda = 0) problem: u_hat(k, t) = exp(-i omega(k) t) u_hat(k, 0).
inline Spectrum linear_exact(const EquationParams& params, const SpectralGrid& grid,
                             std::span<const Complex> initial, double t) {
  if (!(t >= 0.0)) throw InvalidArgument("time must be >= 0");
  detail::require_length(initial.size(), grid, "linear_exact");
  const auto omega = dispersion_symbol(params, grid);
  Spectrum out(initial.begin(), initial.end());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    out[j] *= std::polar(1.0, -omega[j] * t);
  }
  return out;
}

/// Stop rule for evolve. Blow-up is declared when the relative I2 drift
/// exceeds drift_threshold at a recorded step; linf_ceiling only guards
/// against overflow.
struct StopCondition {
  double max_time = 1.0;
  double drift_threshold = 5e-3;
  double linf_ceiling = 1e6;

  void validate() const {
    if (!(max_time > 0.0) || !(drift_threshold > 0.0) || !(linf_ceiling > 0.0)) {
      throw InvalidArgument("stop condition fields must all be positive");
    }
  }
};

enum class Outcome { CompletedToMaxTime, BlowUpDetected, Aborted };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::CompletedToMaxTime: return "CompletedToMaxTime";
    case Outcome::BlowUpDetected: return "BlowUpDetected";
    case Outcome::Aborted: return "Aborted";
  }
  return "?";
}

struct RunVerdict {
  Outcome outcome = Outcome::CompletedToMaxTime;
  double end_time = 0.0;
  std::string reason;
};

struct EvolveOptions {
  int record_every = 100;
  bool dealias = true;
  /// Index s of the H^s norm stored in each record; negative means 2 + alpha/2.
  double sobolev_index = -1.0;
  /// Extra times at which on_snapshot is called with the state nearest in steps.
  std::vector<double> snapshot_times;
};

struct EvolveObserver {
  std::function<void(const DiagnosticsRecord&, const FieldState&)> on_record;
  std::function<void(const FieldState&)> on_snapshot;
};

struct Evolution {
  RunVerdict verdict;
  FieldState final_state;
  /// Largest relative drift of I1 over the recorded steps.
  double max_drift_I1 = 0.0;
  std::vector<std::string> warnings;
};

/// Number of fixed steps of size dt needed to reach `max_time`.
inline long step_count(double max_time, double dt) {
  const double ratio = max_time / dt;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio)) return static_cast<long>(nearest);
  return static_cast<long>(std::ceil(ratio));
}

/// March the initial state with fixed RK4 steps until max_time, a drift
/// breach, or the amplitude ceiling. Diagnostics are recorded at t = 0, every
/// `record_every` steps and at the last step; stop conditions are checked at
/// those records. Overflow ends the run with an Aborted verdict.
inline Evolution evolve(const EquationParams& params, const SpectralGrid& grid, const FieldState& initial, double dt,
                        const StopCondition& stop, const EvolveOptions& options = {},
                        const EvolveObserver& observer = {}) {
  params.validate();
  stop.validate();
  if (!(dt > 0.0)) throw InvalidArgument("time step must be positive");
  if (options.record_every < 1) throw InvalidArgument("record_every must be >= 1");
  detail::require_length(initial.spectrum.size(), grid, "evolve");

  Evolution result;
  if (dt > stable_dt(params, grid, 1.0)) {
    result.warnings.push_back("dt = " + std::to_string(dt) + " exceeds the linear stability estimate " +
                              std::to_string(stable_dt(params, grid, 1.0)));
  }
  const double s_index = options.sobolev_index >= 0.0 ? options.sobolev_index : 2.0 + 0.5 * params.alpha;

  std::vector<long> snapshot_steps;
  for (double t : options.snapshot_times) {
    if (t < 0.0 || t > stop.max_time + dt) throw InvalidArgument("snapshot time outside [0, max_time]");
    snapshot_steps.push_back(std::lround(t / dt));
  }

  const long total_steps = step_count(stop.max_time, dt);
  detail::Rk4Stepper stepper(params, grid, options.dealias);
  Spectrum u = initial.spectrum;
  const double t0 = initial.time;

  FieldState current = FieldState::from_spectrum(grid, u, t0);
  const DiagnosticsRecord first = measure(current, grid, params, s_index, invariant_I2(current, grid, params));
  const double I2_ref = first.I2;
  const double I1_ref = first.I1;
  if (observer.on_record) observer.on_record(first, current);

  auto snapshot_due = [&](long step) {
    return std::find(snapshot_steps.begin(), snapshot_steps.end(), step) != snapshot_steps.end();
  };
  if (observer.on_snapshot && snapshot_due(0)) observer.on_snapshot(current);

  result.verdict = {Outcome::CompletedToMaxTime, t0, "reached max_time"};
  for (long step = 1; step <= total_steps; ++step) {
    const double t_prev = t0 + static_cast<double>(step - 1) * dt;
    const double t_now = t0 + static_cast<double>(step) * dt;
    try {
      stepper.step(u, t_prev, dt);
    } catch (const NumericalOverflow& e) {
      result.verdict = {Outcome::Aborted, e.time(), e.what()};
      result.final_state = FieldState{{}, u, t_prev};
      return result;
    }
    const bool record = step % options.record_every == 0 || step == total_steps;
    const bool snap = observer.on_snapshot && snapshot_due(step);
    if (!record && !snap) continue;

    current = FieldState::from_spectrum(grid, u, t_now);
    if (snap) observer.on_snapshot(current);
    if (!record) continue;

    const DiagnosticsRecord rec = measure(current, grid, params, s_index, I2_ref);
    result.max_drift_I1 = std::max(result.max_drift_I1, relative_drift(rec.I1, I1_ref));
    if (observer.on_record) observer.on_record(rec, current);
    result.verdict.end_time = t_now;

    if (!std::isfinite(rec.I2) || !std::isfinite(rec.linf)) {
      result.verdict = {Outcome::Aborted, t_now, "non-finite diagnostics"};
      break;
    }
    if (rec.linf > stop.linf_ceiling) {
      result.verdict = {Outcome::Aborted, t_now, "amplitude ceiling exceeded (linf = " + std::to_string(rec.linf) + ")"};
      break;
    }
    if (rec.drift_I2 > stop.drift_threshold) {
      result.verdict = {Outcome::BlowUpDetected, t_now,
                        "relative I2 drift " + std::to_string(rec.drift_I2) + " exceeded " +
                            std::to_string(stop.drift_threshold)};
      break;
    }
  }
  result.final_state = std::move(current);
  return result;
}

}  // namespace fracwave
