// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [filter...]
//
// With filters, only criteria whose key contains one of them run. Artifacts of
// the scenario runs go to ./acceptance_runs/.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fracwave/fracwave.hpp"
#include "fracwave/scenario_config.hpp"

using namespace fracwave;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = FRACWAVE_SCENARIO_DIR;
const fs::path kRuns = "acceptance_runs";

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[1024];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> random_field(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

double spectral_rel_l2(const Spectrum& a, const Spectrum& b) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    num += std::norm(a[j] - b[j]);
    den += std::norm(b[j]);
  }
  return std::sqrt(num / den);
}

// ---------------------------------------------------------------------------

Verdict transforms() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst_round = 0.0;
  double worst_parseval = 0.0;
  for (std::size_t n : {64u, 1024u}) {
    const auto g = make_grid(7.0, n);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto u = random_field(n, seed * 1000 + n);
      const auto s = to_spectrum(u, g);
      const auto back = to_field(s, g);
      double umax = 0.0;
      double err = 0.0;
      double phys = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        umax = std::max(umax, std::abs(u[j]));
        err = std::max(err, std::abs(back[j] - u[j]));
        phys += u[j] * u[j];
      }
      phys *= g.dx();
      double spectral = 0.0;
      for (const auto& c : s) spectral += std::norm(c);
      spectral *= g.dk() / (2 * std::numbers::pi);
      worst_round = std::max(worst_round, err / umax);
      worst_parseval = std::max(worst_parseval, std::abs(spectral - phys) / phys);
    }
  }
  const double elapsed = seconds_since(t0);
  const bool pass = worst_round <= 1e-12 && worst_parseval <= 1e-12 && elapsed < 1.0;
  return {pass, fmt("round trip %.2e, Parseval %.2e (tol 1e-12), %.3f s (limit 1 s)", worst_round, worst_parseval,
                    elapsed)};
}

Verdict linear_oracle() {
  const auto g = make_grid(20.0, 1024);
  EquationParams p = EquationParams::unit(0.5);
  p.lambda = 0.0;
  const auto u0 = sech2_profile(g, 1.0);
  const double dt_max = stable_dt(p, g, 0.5);
  const long steps = static_cast<long>(std::ceil(1.0 / dt_max));
  const double dt = 1.0 / static_cast<double>(steps);
  const auto ev = evolve(p, g, u0, dt, StopCondition{1.0, 1.0, 1e6}, {.record_every = 1000, .dealias = true});
  const double lin_err = spectral_rel_l2(ev.final_state.spectrum, linear_exact(p, g, u0.spectrum, ev.final_state.time));

  // Richardson: same nonlinear problem with h, h/2, h/4 over a fixed interval.
  const EquationParams q = EquationParams::unit(0.5);
  const auto v0 = sech2_profile(g, 1.0);
  const double T = 1.0;
  const long base = static_cast<long>(std::ceil(T / stable_dt(q, g, 1.0)));
  auto run = [&](long n) {
    detail::Rk4Stepper stepper(q, g, true);
    Spectrum s = v0.spectrum;
    const double h = T / static_cast<double>(n);
    for (long i = 0; i < n; ++i) stepper.step(s, i * h, h);
    return s;
  };
  const auto a = run(base);
  const auto b = run(2 * base);
  const auto c = run(4 * base);
  double e1 = 0.0;
  double e2 = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    e1 += std::norm(a[j] - b[j]);
    e2 += std::norm(b[j] - c[j]);
  }
  const double order = std::log2(std::sqrt(e1 / e2));
  const bool pass = lin_err <= 1e-8 && std::abs(order - 4.0) <= 0.2;
  return {pass, fmt("linear error %.2e at dt %.3e (tol 1e-8); Richardson order %.3f (4.0 +- 0.2)", lin_err, dt, order)};
}

Verdict soliton_alpha2_check() {
  const Scenario s = load_scenario(kScenarios / "soliton_alpha2.toml");
  const auto g = s.make_grid();
  const auto u0 = make_initial(s.initial, g, s.params);
  const double residual = traveling_residual(s.params, g, u0, s.initial.c);
  const RunResult r = run_scenario(s, kRuns / s.name);
  double err = 0.0;
  double norm = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double exact = soliton_alpha2_value(s.params, s.initial.c, g.nodes()[j], r.final_state.time);
    err += std::pow(r.final_state.values[j] - exact, 2);
    norm += exact * exact;
  }
  err = std::sqrt(g.dx() * err);
  norm = std::sqrt(g.dx() * norm);
  const bool pass = r.verdict.outcome == Outcome::CompletedToMaxTime && err <= 1e-6 && residual <= 1e-8;
  return {pass, fmt("L2 shape error %.2e at t = %.4f (tol 1e-6, relative %.2e); residual %.2e (tol 1e-8)", err,
                    r.final_state.time, err / norm, residual)};
}

Verdict soliton_alpha1_check() {
  Scenario s = load_scenario(kScenarios / "soliton_alpha1.toml");
  s.record_every = 1;
  const RunResult r = run_scenario(s, kRuns / s.name);
  const double peak0 = r.records.front().linf;
  double worst = 0.0;
  for (const auto& rec : r.records) worst = std::max(worst, std::abs(rec.linf / peak0 - 1.0));
  const bool pass = r.verdict.outcome == Outcome::CompletedToMaxTime && r.final_state.time >= 5.0 && worst <= 0.01;
  return {pass, fmt("max relative peak change %.3e over %zu records to t = %.3f (tol 1e-2)", worst, r.records.size(),
                    r.final_state.time)};
}

/// Largest distance between two local maxima above 25% of the global maximum.
/// `runner_up` receives the second-highest local maximum relative to the global one.
double hump_separation(const SpectralGrid& g, const std::vector<double>& u, int* count, double* runner_up) {
  const std::size_t n = u.size();
  double peak = 0.0;
  for (double v : u) peak = std::max(peak, v);
  std::vector<double> xs;
  std::vector<double> heights;
  for (std::size_t j = 0; j < n; ++j) {
    const double left = u[(j + n - 1) % n];
    const double right = u[(j + 1) % n];
    if (u[j] <= left || u[j] < right) continue;
    heights.push_back(u[j]);
    if (u[j] > 0.25 * peak) xs.push_back(g.nodes()[j]);
  }
  std::sort(heights.rbegin(), heights.rend());
  *runner_up = heights.size() > 1 ? heights[1] / peak : 0.0;
  *count = static_cast<int>(xs.size());
  double best = 0.0;
  for (std::size_t a = 0; a < xs.size(); ++a) {
    for (std::size_t b = a + 1; b < xs.size(); ++b) {
      const double d = std::abs(xs[a] - xs[b]);
      best = std::max(best, std::min(d, g.period() - d));
    }
  }
  return best;
}

Verdict experiment1() {
  std::string detail;
  bool pass = true;
  for (const auto& [file, tol] : {std::pair{"exp1_two_humps.toml", 1e-6}, std::pair{"exp1_ci.toml", 1e-5}}) {
    const Scenario s = load_scenario(kScenarios / file);
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult r = run_scenario(s, kRuns / s.name);
    int humps = 0;
    double runner_up = 0.0;
    const double sep = hump_separation(s.make_grid(), r.final_state.values, &humps, &runner_up);
    const bool ok = r.verdict.outcome == Outcome::CompletedToMaxTime && r.max_drift_I2 <= tol && sep > 5.0;
    pass = pass && ok;
    detail += fmt("%sN=%zu: %s, drift %.2e (tol %.0e), %d humps above 25%%, second peak %.1f%% of max, "
                  "separation %.2f (> 5), %.0f s",
                  detail.empty() ? "" : "; ", s.num_points, to_string(r.verdict.outcome), r.max_drift_I2, tol, humps,
                  100.0 * runner_up, sep, seconds_since(t0));
  }
  return {pass, detail};
}

Verdict experiment3() {
  std::string detail;
  bool pass = true;
  struct Case {
    const char* file;
    double lo;
    double hi;
  };
  for (const auto& c : {Case{"exp3_ci.toml", 8.0, 15.0}, Case{"exp3_blowup.toml", 11.527 * 0.9, 11.527 * 1.1}}) {
    const Scenario s = load_scenario(kScenarios / c.file);
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult r = run_scenario(s, kRuns / s.name);
    const double t = r.verdict.end_time;
    const bool ok = r.verdict.outcome == Outcome::BlowUpDetected && t >= c.lo && t <= c.hi;
    pass = pass && ok;
    detail += fmt("%sN=%zu: %s at t = %.3f (window [%.3f, %.3f]), %.0f s", detail.empty() ? "" : "; ", s.num_points,
                  to_string(r.verdict.outcome), t, c.lo, c.hi, seconds_since(t0));
  }
  return {pass, detail};
}

Verdict experiment4() {
  const Scenario s = load_scenario(kScenarios / "exp4_small_data.toml");
  const auto t0 = std::chrono::steady_clock::now();
  const RunResult r = run_scenario(s, kRuns / s.name);
  double prev = std::numeric_limits<double>::infinity();
  int rises = 0;
  double worst_rise = 0.0;
  for (const auto& rec : r.records) {
    if (rec.time < 5.0) continue;
    if (rec.linf > prev) {
      ++rises;
      worst_rise = std::max(worst_rise, rec.linf / prev - 1.0);
    }
    prev = rec.linf;
  }
  const bool pass = r.verdict.outcome == Outcome::CompletedToMaxTime && r.max_drift_I2 <= 1e-11 && rises == 0;
  return {pass, fmt("%s, drift %.2e (tol 1e-11), L-inf %.4f -> %.4f with %d increases after t = 5 (largest %.1e), "
                    "%.0f s",
                    to_string(r.verdict.outcome), r.max_drift_I2, r.records.front().linf, r.records.back().linf, rises,
                    worst_rise, seconds_since(t0))};
}

Verdict kernel_suite() {
  const EquationParams p = EquationParams::unit(0.5);
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> log_r(-3.0, 3.0);
  std::uniform_real_distribution<double> angle(0.0, 2 * std::numbers::pi);
  double worst_sym = 0.0;
  double worst_cancel = 0.0;
  int points = 0;
  while (points < 10000) {
    const double r = std::pow(10.0, log_r(rng));
    const double a = r * std::cos(angle(rng));
    const double b = r * std::sin(angle(rng));
    if (a == 0.0 || b == 0.0 || a + b == 0.0 || a == b) continue;
    const double m1 = kernel_m(p, a, b);
    const double m2 = kernel_m(p, b, a);
    worst_sym = std::max(worst_sym, std::abs(m1 - m2) / std::abs(m1));
    worst_cancel = std::max(worst_cancel, cancellation_residual(p, a, b).relative());
    ++points;
  }
  const double m11 = kernel_m(p, 1.0, 1.0);
  const double m11_err = std::abs(m11 + (1.0 + std::sqrt(2.0)) / 2.0);
  const bool pass = worst_sym <= 1e-10 && worst_cancel <= 1e-10 && m11_err <= 1e-12;
  return {pass, fmt("%d points: symmetry %.2e, cancellation %.2e (tol 1e-10); m(1,1) = %.15f, error %.1e (tol 1e-12)",
                    points, worst_sym, worst_cancel, m11, m11_err)};
}

Verdict pseudo_product_oracle() {
  const auto g = make_grid(3.0, 64);
  const EquationParams p = EquationParams::unit(0.5);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> pick(1, 15);
  std::normal_distribution<double> n(0.0, 1.0);
  double worst = 0.0;
  int fields = 0;
  for (int active = 1; active <= 8; ++active) {
    for (int rep = 0; rep < 5; ++rep) {
      std::map<long, Complex> support;
      while (static_cast<int>(support.size()) < 2 * active) {
        const long m = pick(rng);
        if (support.count(m)) continue;
        const Complex c(n(rng), n(rng));
        support[m] = c;
        support[-m] = std::conj(c);
      }
      Spectrum s(g.size());
      for (const auto& [m, c] : support) s[g.index_of_mode(m)] = c;
      const auto u = FieldState::from_spectrum(g, s);
      std::map<long, Complex> brute;
      for (const auto& [mp, a] : support) {
        for (const auto& [mq, b] : support) {
          if (mp + mq != 0) brute[mp + mq] += g.dk() * kernel_m(p, g.dk() * mp, g.dk() * mq) * a * b;
        }
      }
      double scale = 0.0;
      for (const auto& [m, v] : brute) scale = std::max(scale, std::abs(v));
      const auto out = pseudo_product(p, g, u);
      for (std::size_t j = 0; j < g.size(); ++j) {
        const long m = g.modes()[j];
        const auto it = brute.find(m);
        const Complex expected = it == brute.end() ? Complex(0.0) : it->second;
        worst = std::max(worst, std::abs(out.spectrum[j] - expected) / scale);
      }
      ++fields;
    }
  }
  return {worst <= 1e-12, fmt("%d fields with 1..8 active modes, N = 64: max relative deviation %.2e (tol 1e-12)",
                              fields, worst)};
}

FieldState energy_profile(const SpectralGrid& g, double s, double eps) {
  auto u = sech2_profile(g, 1.0);
  u.spectrum[0] = 0.0;
  const double norm = sobolev_norm(FieldState::from_spectrum(g, u.spectrum), g, s);
  for (auto& c : u.spectrum) c *= eps / norm;
  return FieldState::from_spectrum(g, std::move(u.spectrum));
}

Verdict energy_and_lifespan() {
  bool pass = true;
  std::string detail = "energy ratio at |u| = 0.01 / 0.005:";
  const auto g = make_grid(10 * std::numbers::pi, 256);
  for (double alpha : {0.2, 0.5, 0.9}) {
    const auto p = EquationParams::unit(alpha);
    const double s = 2.0 + 0.5 * alpha;
    const auto u = energy_profile(g, s, 0.01);
    const double r1 = energy_equivalence_ratio(p, g, u, 2);
    const auto e = modified_energy(p, g, u, 2);
    double quadratic = e.l2_part;
    for (double q : e.quadratic_parts) quadratic += q;
    const double limit = quadratic / std::pow(sobolev_norm(u, g, s), 2);
    const double r2 = energy_equivalence_ratio(p, g, energy_profile(g, s, 0.005), 2);
    const bool in_window = r1 >= 0.5 && r1 <= 2.0;
    const bool shrinking = std::abs(r2 - 1.0) < std::abs(r1 - 1.0);
    pass = pass && in_window && shrinking;
    detail += fmt(" a=%.1f %.4f/%.4f (%s, deviation %s, small-data limit %.4f)", alpha, r1, r2,
                  in_window ? "in [0.5,2]" : "OUTSIDE [0.5,2]", shrinking ? "decreases" : "does NOT decrease", limit);
  }

  const Scenario tmpl = load_scenario(kScenarios / "exp3_ci.toml");
  const std::vector<double> deltas{1.1, 1.5, 2.0, 3.0};
  const SweepResult sweep = lifespan_sweep(0.2, deltas, tmpl, {.workers = 1, .output_root = kRuns / "lifespan"});
  const SweepRow& anchor = sweep.rows.back();
  const double c = anchor.end_time * anchor.delta * anchor.delta;
  detail += fmt("; lifespan c = T(3)*9 = %.2f:", c);
  bool bound = anchor.outcome == Outcome::BlowUpDetected;
  for (const auto& row : sweep.rows) {
    const double need = c / (row.delta * row.delta);
    const bool ok = row.error.empty() && row.end_time >= need;
    bound = bound && ok;
    detail += fmt(" d=%.1f %s T=%.2f (need >= %.2f)", row.delta, phase_label(row), row.end_time, need);
  }
  detail += sweep.fitted_exponent ? fmt(", fitted exponent %.3f", *sweep.fitted_exponent) : ", exponent undefined";
  return {pass && bound, detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"transforms", transforms},
      {"linear-oracle", linear_oracle},
      {"soliton-alpha2", soliton_alpha2_check},
      {"soliton-alpha1", soliton_alpha1_check},
      {"experiment1", experiment1},
      {"experiment3", experiment3},
      {"experiment4", experiment4},
      {"kernel-identities", kernel_suite},
      {"pseudo-product-oracle", pseudo_product_oracle},
      {"modified-energy-and-lifespan", energy_and_lifespan},
  };
  std::vector<std::string> filters(argv + 1, argv + argc);
  fs::create_directories(kRuns);
  int failed = 0;
  int ran = 0;
  for (const auto& [key, check] : criteria) {
    if (!filters.empty() && std::none_of(filters.begin(), filters.end(),
                                         [&](const std::string& f) { return key.find(f) != std::string::npos; })) {
      continue;
    }
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    ++ran;
    failed += v.pass ? 0 : 1;
    std::printf("%s  %-29s %s\n", v.pass ? "PASS" : "FAIL", key.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
