#pragma once

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracwave/diagnostics.hpp"
#include "fracwave/dynamics.hpp"
#include "fracwave/grid.hpp"
#include "fracwave/initial_data.hpp"
#include "fracwave/params.hpp"

namespace fracwave {

struct OutputSpec {
  bool series = true;
  std::vector<double> snapshot_times;
  std::vector<double> spectrum_times;
  /// Also dump the profile and spectrum at the time the run ends.
  bool final_state = true;
};

/// Declarative description of one simulation.
struct Scenario {
  std::string name = "scenario";
  EquationParams params;
  double half_length = 20.0 * std::numbers::pi;
  std::size_t num_points = 4096;
  InitialCondition initial;
  std::optional<double> dt;  // empty: stable_dt with safety 0.5
  StopCondition stop;
  int record_every = 100;
  bool dealias = true;
  OutputSpec outputs;
  std::filesystem::path output_dir;

  void validate() const {
    params.validate();
    stop.validate();
    if (dt && !(*dt > 0.0)) throw InvalidArgument(name + ": dt must be positive or \"auto\"");
    if (record_every < 1) throw InvalidArgument(name + ": record_every must be >= 1");
    for (double t : outputs.snapshot_times) {
      if (t < 0.0 || t > stop.max_time) throw InvalidArgument(name + ": snapshot time outside [0, max_time]");
    }
    for (double t : outputs.spectrum_times) {
      if (t < 0.0 || t > stop.max_time) throw InvalidArgument(name + ": spectrum time outside [0, max_time]");
    }
  }

  SpectralGrid make_grid() const { return SpectralGrid(half_length, num_points); }

  double resolve_dt(const SpectralGrid& grid) const { return dt ? *dt : stable_dt(params, grid, kDefaultSafety); }
};

struct RunResult {
  RunVerdict verdict;
  double dt = 0.0;
  std::vector<DiagnosticsRecord> records;
  double max_drift_I2 = 0.0;
  double max_drift_I1 = 0.0;
  FieldState final_state;
  std::vector<std::filesystem::path> artifacts;
  std::vector<std::string> warnings;
};

/// Shortest decimal form of a time for file names: 5 -> "5", 11.527 -> "11.527".
inline std::string time_label(double t) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, t);
  if (ec != std::errc()) throw std::runtime_error("cannot format time");
  return std::string(buf, end);
}

inline std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  return out;
}

inline void write_snapshot(const std::filesystem::path& path, const SpectralGrid& grid, const FieldState& s) {
  auto out = open_output(path);
  out << "x,u\n";
  const auto x = grid.nodes();
  for (std::size_t j = 0; j < grid.size(); ++j) out << format17(x[j]) << ',' << format17(s.values[j]) << '\n';
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

/// Spectrum modulus in ascending k.
inline void write_spectrum(const std::filesystem::path& path, const SpectralGrid& grid, const FieldState& s) {
  auto out = open_output(path);
  out << "k,modulus\n";
  const auto k = grid.wavenumbers();
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + n / 2) % n;
    out << format17(k[j]) << ',' << format17(std::abs(s.spectrum[j])) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

inline const char* initial_kind_name(InitialKind k) {
  switch (k) {
    case InitialKind::Sech2: return "sech2";
    case InitialKind::SolitonAlpha2: return "soliton_alpha2";
    case InitialKind::SolitonAlpha1: return "soliton_alpha1";
    case InitialKind::FromFile: return "from_file";
  }
  return "?";
}

/// The requested time that step time t stands for, if any.
inline std::optional<double> matching_time(const std::vector<double>& times, double t, double dt) {
  for (double s : times) {
    if (std::abs(s - t) <= 0.5 * dt) return s;
  }
  return std::nullopt;
}

inline bool contains_time(const std::vector<double>& times, double t, double dt) {
  return matching_time(times, t, dt).has_value();
}

}  // namespace detail

inline nlohmann::json manifest_json(const Scenario& s, const RunResult& r, double sobolev_index) {
  using nlohmann::json;
  json m;
  m["name"] = s.name;
  m["params"] = {{"kappa", s.params.kappa}, {"lambda", s.params.lambda}, {"mu", s.params.mu},
                 {"nu", s.params.nu},       {"alpha", s.params.alpha}};
  m["grid"] = {{"half_length", s.half_length}, {"num_points", s.num_points}};
  m["initial"] = {{"kind", detail::initial_kind_name(s.initial.kind)},
                  {"delta", s.initial.delta},
                  {"c", s.initial.c},
                  {"shift", s.initial.shift},
                  {"path", s.initial.path}};
  m["dt"] = r.dt;
  m["dt_mode"] = s.dt ? "fixed" : "auto";
  m["stop"] = {{"max_time", s.stop.max_time},
               {"drift_threshold", s.stop.drift_threshold},
               {"linf_ceiling", s.stop.linf_ceiling}};
  m["record_every"] = s.record_every;
  m["conventions"] = {
      {"dealias", s.dealias},
      {"dealias_keep_fraction", s.dealias ? json(kTwoThirds) : json(nullptr)},
      {"drift_variable", "I2"},
      {"drift_definition", "|I2(t) - I2(0)| / |I2(0)|, checked at recorded steps"},
      {"transform", "u_hat(k_j) = dx * sum_m u(x_m) exp(-i k_j x_m); u(x_m) = (1/2L) sum_j u_hat(k_j) exp(i k_j x_m)"},
      {"nyquist", "zeroed in derivative multipliers"},
      {"time_integrator", "classical RK4, fixed step"},
      {"sobolev_index", sobolev_index}};
  m["verdict"] = {{"outcome", to_string(r.verdict.outcome)},
                  {"end_time", r.verdict.end_time},
                  {"reason", r.verdict.reason}};
  json summary = {{"max_drift_I2", r.max_drift_I2}, {"max_drift_I1", r.max_drift_I1}};
  if (!r.records.empty()) {
    summary["final_linf"] = r.records.back().linf;
    summary["final_tail_indicator"] = r.records.back().tail_indicator;
  }
  m["summary"] = summary;
  json files = json::array();
  for (const auto& p : r.artifacts) files.push_back(p.filename().string());
  m["artifacts"] = files;
  m["warnings"] = r.warnings;
  return m;
}

/// Run one scenario. When `output_dir` is non-empty, diag.csv,
/// snapshot_t<T>.csv, spectrum_t<T>.csv and manifest.json are written there.
/// Solver aborts are reported in the verdict, not thrown.
inline RunResult run_scenario(const Scenario& s, const std::filesystem::path& output_dir) {
  s.validate();
  const SpectralGrid grid = s.make_grid();
  const FieldState initial = make_initial(s.initial, grid, s.params);
  RunResult result;
  result.dt = s.resolve_dt(grid);
  const bool write = !output_dir.empty();
  if (write) {
    std::error_code ec;
    std::filesystem::create_directories(output_dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + output_dir.string() + "': " + ec.message());
  }

  std::ofstream diag;
  if (write && s.outputs.series) {
    const auto path = output_dir / "diag.csv";
    diag = detail::open_output(path);
    diag << kDiagnosticsCsvHeader << '\n';
    result.artifacts.push_back(path);
  }

  EvolveOptions opts;
  opts.record_every = s.record_every;
  opts.dealias = s.dealias;
  opts.snapshot_times = s.outputs.snapshot_times;
  opts.snapshot_times.insert(opts.snapshot_times.end(), s.outputs.spectrum_times.begin(),
                             s.outputs.spectrum_times.end());
  const double sobolev_index = 2.0 + 0.5 * s.params.alpha;
  opts.sobolev_index = sobolev_index;

  EvolveObserver obs;
  obs.on_record = [&](const DiagnosticsRecord& rec, const FieldState&) {
    result.records.push_back(rec);
    result.max_drift_I2 = std::max(result.max_drift_I2, rec.drift_I2);
    if (diag.is_open()) diag << to_csv_row(rec) << '\n';
  };
  std::vector<double> written_snapshots;
  std::vector<double> written_spectra;
  if (write) {
    // Files are named after the requested time; the state is the one at the nearest step.
    obs.on_snapshot = [&](const FieldState& st) {
      if (auto t = detail::matching_time(s.outputs.snapshot_times, st.time, result.dt);
          t && !detail::contains_time(written_snapshots, st.time, result.dt)) {
        const auto path = output_dir / ("snapshot_t" + time_label(*t) + ".csv");
        detail::write_snapshot(path, grid, st);
        result.artifacts.push_back(path);
        written_snapshots.push_back(st.time);
      }
      if (auto t = detail::matching_time(s.outputs.spectrum_times, st.time, result.dt);
          t && !detail::contains_time(written_spectra, st.time, result.dt)) {
        const auto path = output_dir / ("spectrum_t" + time_label(*t) + ".csv");
        detail::write_spectrum(path, grid, st);
        result.artifacts.push_back(path);
        written_spectra.push_back(st.time);
      }
    };
  }

  Evolution evo = evolve(s.params, grid, initial, result.dt, s.stop, opts, obs);
  result.verdict = evo.verdict;
  result.max_drift_I1 = evo.max_drift_I1;
  result.final_state = std::move(evo.final_state);
  result.warnings = std::move(evo.warnings);

  if (write && s.outputs.final_state && result.final_state.values.size() == grid.size()) {
    const double t = result.final_state.time;
    const std::string label = time_label(t);
    if (!detail::contains_time(written_snapshots, t, result.dt)) {
      const auto path = output_dir / ("snapshot_t" + label + ".csv");
      detail::write_snapshot(path, grid, result.final_state);
      result.artifacts.push_back(path);
    }
    if (!detail::contains_time(written_spectra, t, result.dt)) {
      const auto path = output_dir / ("spectrum_t" + label + ".csv");
      detail::write_spectrum(path, grid, result.final_state);
      result.artifacts.push_back(path);
    }
  }
  if (diag.is_open()) {
    diag.flush();
    if (!diag) throw std::runtime_error("write failed for '" + (output_dir / "diag.csv").string() + "'");
  }
  if (write) {
    const auto path = output_dir / "manifest.json";
    result.artifacts.push_back(path);
    auto out = detail::open_output(path);
    out << manifest_json(s, result, sobolev_index).dump(2) << '\n';
  }
  return result;
}

// ---------------------------------------------------------------------------
// Batches

namespace detail {

/// Run f(i) for i in [0, count) on up to `workers` threads. Each index is
/// handled by exactly one thread; results must be written to per-index slots.
template <class F>
void parallel_for(std::size_t count, int workers, F&& f) {
  const std::size_t threads = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) f(i);
    });
  }
}

inline std::string cell_name(double alpha, double delta) {
  return "a" + time_label(alpha) + "_d" + time_label(delta);
}

}  // namespace detail

struct BatchOptions {
  int workers = 1;
  std::filesystem::path output_root;  // empty: no files
};

struct SweepRow {
  double delta = 0.0;
  double alpha = 0.0;
  double end_time = 0.0;
  Outcome outcome = Outcome::CompletedToMaxTime;
  std::string error;  // non-empty when the run itself failed
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// Least-squares slope of log T_end against log delta over blow-up rows;
  /// empty with fewer than three such rows.
  std::optional<double> fitted_exponent;
};

/// Slope of the least-squares line through (log delta, log T_end) of the blow-up rows.
inline std::optional<double> fit_lifespan_exponent(const std::vector<SweepRow>& rows) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& r : rows) {
    if (r.outcome == Outcome::BlowUpDetected && r.error.empty() && r.end_time > 0.0) {
      xs.push_back(std::log(r.delta));
      ys.push_back(std::log(r.end_time));
    }
  }
  if (xs.size() < 3) return std::nullopt;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

/// One run per delta of the sech^2 template at the given alpha.
inline SweepResult lifespan_sweep(double alpha, const std::vector<double>& deltas, const Scenario& tmpl,
                                  const BatchOptions& options = {}) {
  if (deltas.empty()) throw InvalidArgument("lifespan sweep needs at least one delta");
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0)) throw InvalidArgument("sweep amplitudes must be positive");
    if (i > 0 && !(deltas[i] > deltas[i - 1])) throw InvalidArgument("sweep amplitudes must be sorted ascending");
  }
  SweepResult result;
  result.rows.resize(deltas.size());
  detail::parallel_for(deltas.size(), options.workers, [&](std::size_t i) {
    Scenario s = tmpl;
    s.params.alpha = alpha;
    s.initial.kind = InitialKind::Sech2;
    s.initial.delta = deltas[i];
    s.name = tmpl.name + "_" + detail::cell_name(alpha, deltas[i]);
    SweepRow& row = result.rows[i];
    row.delta = deltas[i];
    row.alpha = alpha;
    try {
      const auto dir = options.output_root.empty() ? std::filesystem::path{}
                                                   : options.output_root / detail::cell_name(alpha, deltas[i]);
      const RunResult r = run_scenario(s, dir);
      row.end_time = r.verdict.end_time;
      row.outcome = r.verdict.outcome;
    } catch (const std::exception& e) {
      row.outcome = Outcome::Aborted;
      row.error = e.what();
    }
  });
  result.fitted_exponent = fit_lifespan_exponent(result.rows);
  return result;
}

struct PhaseDiagram {
  std::vector<double> alphas;
  std::vector<double> deltas;
  /// Row-major, alphas outer: cells[i * deltas.size() + j].
  std::vector<SweepRow> cells;

  const SweepRow& at(std::size_t ia, std::size_t id) const { return cells[ia * deltas.size() + id]; }
};

/// "smooth", "blow-up", "aborted" or "error".
inline const char* phase_label(const SweepRow& row) {
  if (!row.error.empty()) return "error";
  switch (row.outcome) {
    case Outcome::CompletedToMaxTime: return "smooth";
    case Outcome::BlowUpDetected: return "blow-up";
    case Outcome::Aborted: return "aborted";
  }
  return "error";
}

/// Outcome of the sech^2 template for every (alpha, delta) pair. A failing
/// cell is recorded and the remaining cells still run.
inline PhaseDiagram phase_diagram(const std::vector<double>& alphas, const std::vector<double>& deltas,
                                  const Scenario& tmpl, const BatchOptions& options = {}) {
  if (alphas.empty() || deltas.empty()) throw InvalidArgument("phase diagram needs nonempty alpha and delta lists");
  PhaseDiagram out{alphas, deltas, std::vector<SweepRow>(alphas.size() * deltas.size())};
  detail::parallel_for(out.cells.size(), options.workers, [&](std::size_t idx) {
    const double alpha = alphas[idx / deltas.size()];
    const double delta = deltas[idx % deltas.size()];
    SweepRow& row = out.cells[idx];
    row.alpha = alpha;
    row.delta = delta;
    try {
      Scenario s = tmpl;
      s.params.alpha = alpha;
      s.initial.kind = InitialKind::Sech2;
      s.initial.delta = delta;
      s.name = tmpl.name + "_" + detail::cell_name(alpha, delta);
      const auto dir = options.output_root.empty() ? std::filesystem::path{}
                                                   : options.output_root / detail::cell_name(alpha, delta);
      const RunResult r = run_scenario(s, dir);
      row.end_time = r.verdict.end_time;
      row.outcome = r.verdict.outcome;
    } catch (const std::exception& e) {
      row.outcome = Outcome::Aborted;
      row.error = e.what();
    }
  });
  return out;
}

inline void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  auto out = detail::open_output(path);
  out << "alpha,delta,end_time,outcome,label\n";
  for (const auto& r : rows) {
    out << format17(r.alpha) << ',' << format17(r.delta) << ',' << format17(r.end_time) << ','
        << (r.error.empty() ? to_string(r.outcome) : "Error") << ',' << phase_label(r) << '\n';
  }
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

}  // namespace fracwave
