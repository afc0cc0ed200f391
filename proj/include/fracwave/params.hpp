#pragma once

#include <cmath>
#include <string>

#include "fracwave/errors.hpp"

namespace fracwave {

/// Coefficients of u_t + kappa u_x + lambda u u_x - mu D^alpha u_x + nu D^alpha u_t = 0.
struct EquationParams {
  double kappa = 1.0;
  double lambda = 1.0;
  double mu = 1.0;
  double nu = 1.0;
  double alpha = 0.5;

  /// Throws InvalidArgument unless lambda >= 0, nu > 0 and alpha > 0.
  /// lambda = 0 is the linear problem, accepted by the solver for oracle runs.
  void validate() const {
    if (!std::isfinite(kappa) || !std::isfinite(mu)) {
      throw InvalidArgument("kappa and mu must be finite");
    }
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw InvalidArgument("lambda must be nonnegative, got " + std::to_string(lambda));
    }
    if (!(nu > 0.0) || !std::isfinite(nu)) {
      // nu = 0 is the pure fractional KdV limit; its symbol grows like
      // |k|^{1+alpha} and explicit RK4 is not a suitable integrator there.
      throw InvalidArgument("nu must be positive (nu = 0, pure fKdV, is not supported), got " +
                            std::to_string(nu));
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
      throw InvalidArgument("alpha must be positive, got " + std::to_string(alpha));
    }
  }

  /// The normal-form kernel needs lambda > 0 and carries a 2(kappa nu + mu)
  /// factor in its denominator.
  void validate_for_normal_form() const {
    validate();
    if (!(lambda > 0.0)) throw InvalidArgument("the normal form requires lambda > 0");
    if (kappa * nu + mu == 0.0) {
      throw InvalidArgument("kappa*nu + mu must be nonzero for the normal-form kernel");
    }
  }

  static EquationParams unit(double alpha) { return {1.0, 1.0, 1.0, 1.0, alpha}; }
};

}  // namespace fracwave
