#pragma once

// TOML front end for Scenario, sweep and phase-diagram configurations.

#include <filesystem>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <toml.hpp>

#include "fracwave/experiments.hpp"

namespace fracwave {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void reject_unknown_keys(const toml::table& t, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : t) {
    if (!allowed.contains(std::string(key.str()))) {
      throw ConfigError(where + ": unknown key '" + std::string(key.str()) + "'");
    }
  }
}

inline double get_number(const toml::table& t, const std::string& key, const std::string& where) {
  const auto* node = t.get(key);
  if (!node) throw ConfigError(where + ": missing key '" + key + "'");
  if (auto v = node->value<double>()) return *v;
  throw ConfigError(where + ": key '" + key + "' must be a number");
}

inline double get_number_or(const toml::table& t, const std::string& key, double fallback, const std::string& where) {
  return t.contains(key) ? get_number(t, key, where) : fallback;
}

inline std::vector<double> get_numbers(const toml::table& t, const std::string& key, const std::string& where) {
  std::vector<double> out;
  const auto* node = t.get(key);
  if (!node) return out;
  const auto* arr = node->as_array();
  if (!arr) throw ConfigError(where + ": key '" + key + "' must be an array of numbers");
  for (const auto& el : *arr) {
    auto v = el.value<double>();
    if (!v) throw ConfigError(where + ": key '" + key + "' must be an array of numbers");
    out.push_back(*v);
  }
  return out;
}

inline const toml::table& get_table(const toml::table& t, const std::string& key, const std::string& where) {
  const auto* node = t.get(key);
  if (!node || !node->is_table()) throw ConfigError(where + ": missing table [" + key + "]");
  return *node->as_table();
}

inline InitialKind parse_initial_kind(const std::string& s, const std::string& where) {
  if (s == "sech2") return InitialKind::Sech2;
  if (s == "soliton_alpha2") return InitialKind::SolitonAlpha2;
  if (s == "soliton_alpha1") return InitialKind::SolitonAlpha1;
  if (s == "from_file") return InitialKind::FromFile;
  throw ConfigError(where + ": unknown initial kind '" + s + "'");
}

}  // namespace detail

/// Build a Scenario from a parsed TOML table. Relative paths (initial data
/// file, output_dir) are resolved against `base_dir`.
inline Scenario scenario_from_toml(const toml::table& root, const std::filesystem::path& base_dir,
                                   const std::string& where) {
  using namespace detail;
  reject_unknown_keys(root, {"name", "dt", "record_every", "dealias", "output_dir", "params", "grid", "initial",
                             "stop", "outputs"},
                      where);
  Scenario s;
  s.name = root["name"].value_or(std::string("scenario"));

  if (const auto* dt = root.get("dt")) {
    if (auto str = dt->value<std::string>()) {
      if (*str != "auto") throw ConfigError(where + ": dt must be a number or \"auto\"");
    } else if (auto v = dt->value<double>()) {
      s.dt = *v;
    } else {
      throw ConfigError(where + ": dt must be a number or \"auto\"");
    }
  }
  if (const auto* re = root.get("record_every")) {
    auto v = re->value<int64_t>();
    if (!v) throw ConfigError(where + ": record_every must be an integer");
    s.record_every = static_cast<int>(*v);
  }
  if (const auto* d = root.get("dealias")) {
    auto v = d->value<bool>();
    if (!v) throw ConfigError(where + ": dealias must be a boolean");
    s.dealias = *v;
  }
  if (auto od = root["output_dir"].value<std::string>()) s.output_dir = base_dir / *od;

  const auto& params = get_table(root, "params", where);
  reject_unknown_keys(params, {"kappa", "lambda", "mu", "nu", "alpha"}, where + " [params]");
  s.params.kappa = get_number_or(params, "kappa", 1.0, where);
  s.params.lambda = get_number_or(params, "lambda", 1.0, where);
  s.params.mu = get_number_or(params, "mu", 1.0, where);
  s.params.nu = get_number_or(params, "nu", 1.0, where);
  s.params.alpha = get_number(params, "alpha", where + " [params]");

  const auto& grid = get_table(root, "grid", where);
  reject_unknown_keys(grid, {"half_length", "half_length_over_pi", "num_points"}, where + " [grid]");
  if (grid.contains("half_length") == grid.contains("half_length_over_pi")) {
    throw ConfigError(where + " [grid]: give exactly one of half_length, half_length_over_pi");
  }
  s.half_length = grid.contains("half_length") ? get_number(grid, "half_length", where)
                                               : std::numbers::pi * get_number(grid, "half_length_over_pi", where);
  auto n = grid["num_points"].value<int64_t>();
  if (!n || *n <= 0) throw ConfigError(where + " [grid]: num_points must be a positive integer");
  s.num_points = static_cast<std::size_t>(*n);

  const auto& init = get_table(root, "initial", where);
  reject_unknown_keys(init, {"kind", "delta", "c", "shift", "path"}, where + " [initial]");
  s.initial.kind = parse_initial_kind(init["kind"].value_or(std::string("sech2")), where);
  s.initial.delta = get_number_or(init, "delta", 1.0, where);
  s.initial.c = get_number_or(init, "c", 2.0, where);
  s.initial.shift = get_number_or(init, "shift", 0.0, where);
  if (auto p = init["path"].value<std::string>()) s.initial.path = (base_dir / *p).string();
  if (s.initial.kind == InitialKind::FromFile && s.initial.path.empty()) {
    throw ConfigError(where + " [initial]: from_file needs a path");
  }

  const auto& stop = get_table(root, "stop", where);
  reject_unknown_keys(stop, {"max_time", "drift_threshold", "linf_ceiling"}, where + " [stop]");
  s.stop.max_time = get_number(stop, "max_time", where + " [stop]");
  s.stop.drift_threshold = get_number_or(stop, "drift_threshold", 5e-3, where);
  s.stop.linf_ceiling = get_number_or(stop, "linf_ceiling", 1e6, where);

  if (const auto* out = root.get("outputs")) {
    if (!out->is_table()) throw ConfigError(where + ": outputs must be a table");
    const auto& ot = *out->as_table();
    reject_unknown_keys(ot, {"series", "snapshots", "spectra", "final"}, where + " [outputs]");
    s.outputs.series = ot["series"].value_or(true);
    s.outputs.final_state = ot["final"].value_or(true);
    s.outputs.snapshot_times = get_numbers(ot, "snapshots", where);
    s.outputs.spectrum_times = get_numbers(ot, "spectra", where);
  }
  s.validate();
  return s;
}

inline toml::table parse_toml_file(const std::filesystem::path& path) {
  try {
    return toml::parse_file(path.string());
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << path.string() << ":" << e.source().begin.line << ": " << e.description();
    throw ConfigError(msg.str());
  }
}

inline Scenario load_scenario(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("scenario file '" + path.string() + "' does not exist");
  return scenario_from_toml(parse_toml_file(path), path.parent_path(), path.string());
}

/// Batch configuration: a template scenario (inline [template] table or a
/// `template = "file.toml"` reference) plus the [sweep] or [phase] table.
struct BatchConfig {
  Scenario tmpl;
  std::vector<double> alphas;  // phase diagram
  double alpha = 0.0;          // lifespan sweep
  std::vector<double> deltas;
  int workers = 1;
  std::filesystem::path output_dir;
};

inline BatchConfig load_batch(const std::filesystem::path& path, const std::string& section) {
  using namespace detail;
  const toml::table root = parse_toml_file(path);
  const std::string where = path.string();
  reject_unknown_keys(root, {"template", section}, where);
  BatchConfig cfg;
  const auto base = path.parent_path();
  const auto* t = root.get("template");
  if (!t) throw ConfigError(where + ": missing template");
  if (auto ref = t->value<std::string>()) {
    cfg.tmpl = load_scenario(base / *ref);
  } else if (t->is_table()) {
    cfg.tmpl = scenario_from_toml(*t->as_table(), base, where + " [template]");
  } else {
    throw ConfigError(where + ": template must be a file name or a table");
  }
  const auto& sec = get_table(root, section, where);
  reject_unknown_keys(sec, {"alpha", "alphas", "deltas", "workers", "output_dir"}, where + " [" + section + "]");
  cfg.deltas = get_numbers(sec, "deltas", where);
  cfg.alphas = get_numbers(sec, "alphas", where);
  cfg.alpha = get_number_or(sec, "alpha", cfg.tmpl.params.alpha, where);
  cfg.workers = static_cast<int>(sec["workers"].value_or(int64_t{1}));
  cfg.output_dir = base / sec["output_dir"].value_or(std::string("runs/" + section));
  return cfg;
}

}  // namespace fracwave
