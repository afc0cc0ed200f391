#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fracwave/errors.hpp"
#include "fracwave/grid.hpp"
#include "fracwave/params.hpp"
#include "fracwave/transforms.hpp"

namespace fracwave {

enum class InitialKind { Sech2, SolitonAlpha2, SolitonAlpha1, FromFile };

struct InitialCondition {
  InitialKind kind = InitialKind::Sech2;
  double delta = 1.0;  // Sech2 amplitude
  double c = 2.0;      // soliton speed
  double shift = 0.0;  // soliton center
  std::string path;    // FromFile
};

inline double sech2(double x) {
  const double s = 1.0 / std::cosh(x);
  return s * s;
}

/// delta * sech^2(x) on the nodes.
inline FieldState sech2_profile(const SpectralGrid& grid, double delta) {
  std::vector<double> v(grid.size());
  const auto x = grid.nodes();
  for (std::size_t j = 0; j < grid.size(); ++j) v[j] = delta * sech2(x[j]);
  return FieldState::from_values(grid, std::move(v));
}

/// Exact alpha = 2 solitary wave
///   3 (c - kappa)/lambda * sech^2( sqrt((c - kappa)/(nu c + mu)) (x - x0 - c t) / 2 ).
inline double soliton_alpha2_value(const EquationParams& params, double c, double x, double t = 0.0,
                                   double x0 = 0.0) {
  const double width = 0.5 * std::sqrt((c - params.kappa) / (params.nu * c + params.mu));
  return 3.0 * (c - params.kappa) / params.lambda * sech2(width * (x - x0 - c * t));
}

inline FieldState soliton_alpha2(const SpectralGrid& grid, const EquationParams& params, double c,
                                 double shift = 0.0) {
  if (params.alpha != 2.0) throw InvalidArgument("the sech^2 solitary wave requires alpha = 2");
  if (!(c > params.kappa)) throw InvalidArgument("soliton speed must exceed kappa");
  if (!(params.nu * c + params.mu > 0.0)) {
    throw InvalidArgument("soliton width radicand (c - kappa)/(nu c + mu) is not positive");
  }
  std::vector<double> v(grid.size());
  const auto x = grid.nodes();
  for (std::size_t j = 0; j < grid.size(); ++j) v[j] = soliton_alpha2_value(params, c, x[j], 0.0, shift);
  return FieldState::from_values(grid, std::move(v));
}

/// Algebraic alpha = 1 solitary wave for unit coefficients:
///   4 (c - 1) / (1 + ((c - 1)/(c + 1))^2 (x - x0 - c t)^2).
inline double soliton_alpha1_value(double c, double x, double t = 0.0, double x0 = 0.0) {
  const double b = (c - 1.0) / (c + 1.0);
  const double xi = x - x0 - c * t;
  return 4.0 * (c - 1.0) / (1.0 + b * b * xi * xi);
}

inline FieldState soliton_alpha1(const SpectralGrid& grid, double c, double shift = 0.0) {
  if (!(c > 1.0)) throw InvalidArgument("the algebraic solitary wave requires c > 1");
  std::vector<double> v(grid.size());
  const auto x = grid.nodes();
  for (std::size_t j = 0; j < grid.size(); ++j) v[j] = soliton_alpha1_value(c, x[j], 0.0, shift);
  return FieldState::from_values(grid, std::move(v));
}

/// L2 norm of  (kappa - c) Q' + lambda Q Q' - (mu + nu c) D^alpha Q',
/// the profile equation of a wave Q(x - ct). No dealiasing is applied.
inline double traveling_residual(const EquationParams& params, const SpectralGrid& grid, const FieldState& profile,
                                 double c) {
  detail::require_length(profile.spectrum.size(), grid, "traveling_residual");
  std::vector<double> sq(profile.values);
  for (double& v : sq) v *= v;
  const Spectrum sq_hat = to_spectrum(sq, grid);
  const auto power = grid.power(params.alpha);
  const auto k = grid.wavenumbers();
  double sum = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (j == grid.nyquist_index()) continue;
    const Complex ik(0.0, k[j]);
    const Complex r = ik * ((params.kappa - c) - (params.mu + params.nu * c) * (*power)[j]) * profile.spectrum[j] +
                      ik * (0.5 * params.lambda) * sq_hat[j];
    sum += std::norm(r);
  }
  return std::sqrt(grid.parseval_weight() * sum);
}

/// Two-column CSV (x, u), optionally with a header line, whose x column
/// matches the grid nodes.
inline FieldState field_from_csv(const SpectralGrid& grid, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open initial data file '" + path + "'");
  std::vector<double> values;
  values.reserve(grid.size());
  const auto x = grid.nodes();
  const double tol = 1e-12 * std::max(1.0, grid.half_length());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double xv = 0.0;
    double uv = 0.0;
    if (!(row >> xv >> uv)) {
      if (values.empty() && line_no == 1) continue;  // header
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected two numeric columns");
    }
    const std::size_t j = values.size();
    if (j >= grid.size()) {
      throw InvalidArgument(path + ": more rows than grid nodes (" + std::to_string(grid.size()) + ")");
    }
    if (std::abs(xv - x[j]) > tol) {
      std::ostringstream msg;
      msg.precision(17);
      msg << path << ":" << line_no << ": node " << j << " has x = " << xv << " but the grid expects " << x[j];
      throw InvalidArgument(msg.str());
    }
    values.push_back(uv);
  }
  if (values.size() != grid.size()) {
    throw InvalidArgument(path + ": " + std::to_string(values.size()) + " rows, grid expects " +
                          std::to_string(grid.size()) + "; first missing node is " + std::to_string(values.size()));
  }
  return FieldState::from_values(grid, std::move(values));
}

/// Build the initial state described by `ic`.
inline FieldState make_initial(const InitialCondition& ic, const SpectralGrid& grid, const EquationParams& params) {
  switch (ic.kind) {
    case InitialKind::Sech2: return sech2_profile(grid, ic.delta);
    case InitialKind::SolitonAlpha2: return soliton_alpha2(grid, params, ic.c, ic.shift);
    case InitialKind::SolitonAlpha1:
      if (params.kappa != 1.0 || params.lambda != 1.0 || params.mu != 1.0 || params.nu != 1.0 ||
          params.alpha != 1.0) {
        throw InvalidArgument("the algebraic solitary wave requires kappa = lambda = mu = nu = 1 and alpha = 1");
      }
      return soliton_alpha1(grid, ic.c, ic.shift);
    case InitialKind::FromFile: return field_from_csv(grid, ic.path);
  }
  throw InvalidArgument("unknown initial condition kind");
}

}  // namespace fracwave
