// Command-line driver: run scenarios, sweeps and phase diagrams, check the
// normal-form kernel identities and evaluate the modified energy.
//
// Exit codes: 0 completed, 2 blow-up detected, 1 error or aborted run.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fracwave/experiments.hpp"
#include "fracwave/fracwave.hpp"
#include "fracwave/scenario_config.hpp"

namespace fs = std::filesystem;
using namespace fracwave;

namespace {

constexpr int kExitCompleted = 0;
constexpr int kExitError = 1;
constexpr int kExitBlowUp = 2;

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::CompletedToMaxTime: return kExitCompleted;
    case Outcome::BlowUpDetected: return kExitBlowUp;
    case Outcome::Aborted: return kExitError;
  }
  return kExitError;
}

fs::path output_dir_for(const Scenario& s, const std::string& override_dir) {
  if (!override_dir.empty()) return override_dir;
  if (!s.output_dir.empty()) return s.output_dir;
  return fs::path("runs") / s.name;
}

int cmd_run(const std::string& path, const std::string& out_override) {
  const Scenario s = load_scenario(path);
  const fs::path dir = output_dir_for(s, out_override);
  std::cerr << "running '" << s.name << "' (N = " << s.num_points << ", L = " << s.half_length
            << ", alpha = " << s.params.alpha << ", dealias " << (s.dealias ? "on" : "off") << ")\n";
  const RunResult r = run_scenario(s, dir);
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << to_string(r.verdict.outcome) << " t=" << r.verdict.end_time << " (" << r.verdict.reason << ")\n"
            << "max I2 drift " << r.max_drift_I2 << ", max I1 drift " << r.max_drift_I1 << '\n'
            << "outputs in " << dir.string() << '\n';
  return exit_code(r.verdict.outcome);
}

int cmd_sweep(const std::string& path, const std::string& out_override) {
  BatchConfig cfg = load_batch(path, "sweep");
  const fs::path dir = out_override.empty() ? cfg.output_dir : fs::path(out_override);
  const SweepResult res = lifespan_sweep(cfg.alpha, cfg.deltas, cfg.tmpl, {cfg.workers, dir});
  fs::create_directories(dir);
  write_sweep_csv(dir / "sweep.csv", res.rows);
  nlohmann::json j;
  j["alpha"] = cfg.alpha;
  j["deltas"] = cfg.deltas;
  j["fitted_exponent"] = res.fitted_exponent ? nlohmann::json(*res.fitted_exponent) : nlohmann::json(nullptr);
  j["fitted_exponent_note"] = res.fitted_exponent ? "slope of log T_end vs log delta over blow-up rows"
                                                  : "undefined: fewer than three blow-up rows";
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : res.rows) {
    rows.push_back({{"delta", r.delta}, {"end_time", r.end_time}, {"outcome", to_string(r.outcome)},
                    {"t_delta_squared", r.end_time * r.delta * r.delta}, {"error", r.error}});
    std::cout << "delta " << r.delta << ": " << phase_label(r) << " at t=" << r.end_time
              << (r.error.empty() ? "" : " (" + r.error + ")") << '\n';
  }
  j["rows"] = rows;
  std::ofstream(dir / "sweep.json") << j.dump(2) << '\n';
  if (res.fitted_exponent) {
    std::cout << "fitted exponent " << *res.fitted_exponent << '\n';
  } else {
    std::cout << "fitted exponent undefined (fewer than three blow-up rows)\n";
  }
  for (const auto& r : res.rows) {
    if (!r.error.empty()) return kExitError;
  }
  return kExitCompleted;
}

int cmd_phase(const std::string& path, const std::string& out_override) {
  BatchConfig cfg = load_batch(path, "phase");
  const fs::path dir = out_override.empty() ? cfg.output_dir : fs::path(out_override);
  const PhaseDiagram pd = phase_diagram(cfg.alphas, cfg.deltas, cfg.tmpl, {cfg.workers, dir});
  fs::create_directories(dir);
  write_sweep_csv(dir / "phase.csv", pd.cells);
  for (const auto& c : pd.cells) {
    std::cout << "alpha " << c.alpha << ", delta " << c.delta << ": " << phase_label(c) << " (t=" << c.end_time
              << ")\n";
  }
  return kExitCompleted;
}

int cmd_kernel_check(const EquationParams& params, int samples, std::uint64_t seed) {
  params.validate_for_normal_form();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  double worst_symmetry = 0.0;
  double worst_cancellation = 0.0;
  int taken = 0;
  while (taken < samples) {
    const double k = dist(rng);
    const double l = dist(rng);
    if (std::abs(l) < 1e-3 || std::abs(k) < 1e-3 || std::abs(k - l) < 1e-3) continue;
    const double a = kernel_m(params, k - l, l);
    const double b = kernel_m(params, l, k - l);
    worst_symmetry = std::max(worst_symmetry, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    worst_cancellation = std::max(worst_cancellation, cancellation_residual(params, k, l).relative());
    ++taken;
  }
  const auto inner = bound_envelope_check(params, EnvelopeRegion::UnitDiskInterior, samples, seed);
  const auto outer = bound_envelope_check(params, EnvelopeRegion::UnitDiskExterior, samples, seed);
  const bool ok_sym = worst_symmetry <= 1e-10;
  const bool ok_can = worst_cancellation <= 1e-10;
  std::printf("kernel symmetry      max rel. defect %.3e  %s\n", worst_symmetry, ok_sym ? "PASS" : "FAIL");
  std::printf("cancellation         max rel. residual %.3e  %s\n", worst_cancellation, ok_can ? "PASS" : "FAIL");
  std::printf("envelope (|p,q|<=1)  ratio in [%.4g, %.4g]  %s\n", inner.ratio_min, inner.ratio_max,
              inner.bounded() ? "PASS" : "FAIL");
  std::printf("envelope (|p,q|>=1)  ratio in [%.4g, %.4g]  %s\n", outer.ratio_min, outer.ratio_max,
              outer.bounded() ? "PASS" : "FAIL");
  bool ok = ok_sym && ok_can && inner.bounded() && outer.bounded();
  if (params.kappa == 1.0 && params.lambda == 1.0 && params.mu == 1.0 && params.nu == 1.0 && params.alpha == 0.5) {
    const double m11 = kernel_m(params, 1.0, 1.0);
    const double expected = -(1.0 + std::numbers::sqrt2) / 2.0;
    const bool ok_val = std::abs(m11 - expected) <= 1e-12 * std::abs(expected);
    std::printf("m(1,1)               %.15f (expected %.15f)  %s\n", m11, expected, ok_val ? "PASS" : "FAIL");
    ok = ok && ok_val;
  }
  return ok ? kExitCompleted : kExitError;
}

int cmd_energy(const std::string& path, double at, int order, bool remove_mean) {
  Scenario s = load_scenario(path);
  if (s.num_points > kMaxPseudoProductSize) {
    throw CapacityError("energy evaluation is O(N^2) and limited to N <= " + std::to_string(kMaxPseudoProductSize));
  }
  const SpectralGrid grid = s.make_grid();
  FieldState state = make_initial(s.initial, grid, s.params);
  if (at > 0.0) {
    s.stop.max_time = at;
    s.outputs = {};
    const RunResult r = run_scenario(s, {});
    if (r.verdict.outcome != Outcome::CompletedToMaxTime) {
      std::cerr << "run ended early: " << to_string(r.verdict.outcome) << " at t=" << r.verdict.end_time << '\n';
      return exit_code(r.verdict.outcome);
    }
    state = r.final_state;
  }
  if (remove_mean) {
    Spectrum modes = state.spectrum;
    modes[0] = 0.0;
    state = FieldState::from_spectrum(grid, std::move(modes), state.time);
  }
  const EnergyBreakdown e = modified_energy(s.params, grid, state, order);
  const double norm = sobolev_norm(state, grid, order + 0.5 * s.params.alpha);
  nlohmann::json j;
  j["time"] = state.time;
  j["n_max"] = e.n_max;
  j["quadratic_parts"] = e.quadratic_parts;
  j["cross_parts"] = e.cross_parts;
  j["l2_part"] = e.l2_part;
  j["total"] = e.total;
  j["sobolev_index"] = order + 0.5 * s.params.alpha;
  j["sobolev_norm_squared"] = norm * norm;
  j["equivalence_ratio"] = e.total / (norm * norm);
  std::cout << j.dump(2) << '\n';
  return kExitCompleted;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral solver and analysis tools for the fractional KdV-BBM equation"};
  app.require_subcommand(1);

  std::string run_path, out_dir;
  auto* run = app.add_subcommand("run", "Run one scenario");
  run->add_option("scenario", run_path, "Scenario TOML file")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--out", out_dir, "Output directory (overrides output_dir in the file)");

  std::string sweep_path;
  auto* sweep = app.add_subcommand("sweep", "Lifespan sweep over initial amplitudes");
  sweep->add_option("config", sweep_path, "Sweep TOML file")->required()->check(CLI::ExistingFile);
  sweep->add_option("-o,--out", out_dir, "Output directory");

  std::string phase_path;
  auto* phase = app.add_subcommand("phase", "Alpha-delta phase diagram");
  phase->add_option("config", phase_path, "Phase TOML file")->required()->check(CLI::ExistingFile);
  phase->add_option("-o,--out", out_dir, "Output directory");

  EquationParams kp = EquationParams::unit(0.5);
  int samples = 10000;
  std::uint64_t seed = 20240601;
  auto* kc = app.add_subcommand("kernel-check", "Normal-form kernel identity suite");
  kc->add_option("--kappa", kp.kappa);
  kc->add_option("--lambda", kp.lambda);
  kc->add_option("--mu", kp.mu);
  kc->add_option("--nu", kp.nu);
  kc->add_option("--alpha", kp.alpha);
  kc->add_option("--samples", samples, "Random points per check")->check(CLI::Range(100, 10000000));
  kc->add_option("--seed", seed);

  std::string energy_path;
  double at = 0.0;
  int order = 2;
  bool remove_mean = false;
  auto* energy = app.add_subcommand("energy", "Modified energy of a scenario state, as JSON");
  energy->add_option("scenario", energy_path, "Scenario TOML file")->required()->check(CLI::ExistingFile);
  energy->add_option("--at", at, "Evolve to this time first")->check(CLI::NonNegativeNumber);
  energy->add_option("--order", order, "Number of derivative levels N (>= 2)")->check(CLI::Range(2, 64));
  energy->add_flag("--remove-mean", remove_mean, "Project out the zero mode before evaluating");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_path, out_dir);
    if (*sweep) return cmd_sweep(sweep_path, out_dir);
    if (*phase) return cmd_phase(phase_path, out_dir);
    if (*kc) return cmd_kernel_check(kp, samples, seed);
    if (*energy) return cmd_energy(energy_path, at, order, remove_mean);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
