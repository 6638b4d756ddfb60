// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "regen/bootstrap.hpp"
#include "regen/chain.hpp"
#include "regen/experiment.hpp"
#include "regen/oracle.hpp"
#include "regen/presets.hpp"
#include "regen/rng.hpp"
#include "regen/splitting.hpp"
#include "regen/stats.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(const char* id, const char* name, bool pass, const std::string& detail) {
  std::printf("%s %s %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

void ac1() {
  const auto start = Clock::now();
  const auto preset = regen::builtin_preset("two-state");
  const auto check = regen::block_mean_check(preset, 0, 100000, 11);
  const double t = seconds_since(start);
  const double gap = std::abs(check.mean - check.target);
  report("AC1", "block identity", gap <= 3.0 * check.se && t < 10.0,
         fmt("|%.5f - %.5f| = %.5f vs 3 SE = %.5f over %zu blocks, %.2f s (limit 10 s)", check.mean, check.target,
             gap, 3.0 * check.se, check.blocks, t));
}

void ac2() {
  const auto preset = regen::builtin_preset("reflected-bm");
  const std::size_t wanted = 10000;
  const auto traj = preset.simulate(16000, 21);
  const auto decomp = regen::extract_blocks(regen::exact_split(traj, preset.model, 21));
  std::vector<double> lengths;
  for (const auto& b : decomp.blocks()) {
    if (lengths.size() == wanted) break;
    lengths.push_back(static_cast<double>(b.length()));
  }
  const double rho = regen::lag1_correlation(lengths);
  const auto ks = regen::regeneration_ks(preset, 5000, 40, 300);
  const bool pass = lengths.size() == wanted && std::abs(rho) <= 0.02 && ks.pass_fraction >= 0.95;
  report("AC2", "regeneration structure", pass,
         fmt("lag-1 length correlation %.4f over %zu blocks (limit 0.02), KS p > 0.01 in %zu/40 seeds (need 38)",
             rho, lengths.size(), ks.passes));
}

void ac3() {
  const auto start = Clock::now();
  const auto preset = regen::builtin_preset("reflected-bm");
  const std::size_t n = 5000;
  const auto traj = preset.simulate(n, 31);
  const auto decomp = regen::extract_blocks(regen::exact_split(traj, preset.model, 31));
  const regen::KernelSpec kernel{regen::KernelType::kEpanechnikov, std::pow(static_cast<double>(n), -0.22)};
  std::vector<double> locations;
  for (double x = 0.1; x < 0.95; x += 0.05) locations.push_back(x);
  auto table = regen::FunctionTable::kernel_table(kernel, locations);
  table.functions.push_back([](double) { return 1.0; });
  table.functions.push_back([](double) { return 0.25; });
  table.locations.push_back(-1.0);
  table.locations.push_back(-2.0);
  const std::size_t g = table.size();

  std::vector<double> pi_hat;
  for (const auto& f : table.functions) pi_hat.push_back(regen::empirical_mean(decomp.samples(), f));
  const auto gamma = regen::empirical_covariance(decomp, table, regen::Centering::at(pi_hat));
  const std::size_t reps = 100000;
  const auto draws = regen::wild_bootstrap_draws(decomp, table, pi_hat, reps, 32);
  const Eigen::MatrixXd emp = draws.values.transpose() * draws.values / static_cast<double>(reps);

  double worst = 0.0;
  for (std::size_t i = 0; i + 2 < g; ++i) {
    for (std::size_t j = 0; j + 2 < g; ++j) {
      const double scale = std::sqrt(gamma(i, i) * gamma(j, j));
      worst = std::max(worst, std::abs(emp(i, j) - gamma(i, j)) / scale);
    }
  }
  const double constant_max = draws.values.rightCols(2).cwiseAbs().maxCoeff();
  const double t = seconds_since(start);
  report("AC3", "conditional bootstrap law", worst <= 0.03 && constant_max == 0.0 && t < 30.0,
         fmt("max |emp - Gamma_hat| / sqrt(Gamma_ii Gamma_jj) = %.4f (limit 0.03) over %zu functions, "
             "constant draws max %.1g, %.2f s (limit 30 s)",
             worst, g - 2, constant_max, t));
}

void ac4() {
  const auto start = Clock::now();
  const auto preset = regen::builtin_preset("two-state");
  const auto table = regen::diagnostic_table(preset, 16);
  const auto centers = regen::finite_expectations(preset.model, table);

  const auto blocks = regen::simulate_independent_blocks(preset.model, 1000000, 41);
  const auto moments = regen::block_moments(blocks, table, centers);
  const Eigen::MatrixXd cov = moments.second_moment / moments.mean_length;
  const std::size_t reps = 10000;
  const auto oracle = regen::gaussian_oracle_sup(cov, reps, 42, regen::SupMode::kSigned);

  const auto traj = preset.simulate(100000, 43);
  const auto decomp = regen::extract_blocks(regen::exact_split(traj, preset.model, 43));
  std::vector<double> pi_hat;
  for (const auto& f : table.functions) pi_hat.push_back(regen::empirical_mean(decomp.samples(), f));
  const auto draws = regen::wild_bootstrap_draws(decomp, table, pi_hat, reps, 44);
  const auto boot = regen::sup_statistic(draws, regen::SupMode::kSigned);

  const double distance = regen::kolmogorov_distance(boot.values, oracle.values);
  const double t = seconds_since(start);
  report("AC4", "bootstrap vs Gaussian", distance <= 0.05 && t < 300.0,
         fmt("Kolmogorov distance %.4f (limit 0.05), B = %zu, oracle from %zu blocks, %.2f s (limit 300 s)",
             distance, reps, blocks.count(), t));
}

void ac5() {
  const auto start = Clock::now();
  const auto preset = regen::builtin_preset("two-state");
  const auto table = regen::diagnostic_table(preset, 16);
  const auto result = regen::delta_decay(preset, table, {2500, 10000, 40000}, 50, 51, 1000000);
  bool ratios_ok = !result.ratios.empty();
  for (double r : result.ratios) ratios_ok = ratios_ok && r >= 0.35 && r <= 0.75;
  const double t = seconds_since(start);
  std::string medians;
  for (const auto& row : result.rows) medians += fmt(" n=%zu:%.5f", row.n, row.median);
  std::string ratios;
  for (double r : result.ratios) ratios += fmt(" %.3f", r);
  report("AC5", "covariance diagnostic decay", result.monotone && ratios_ok && t < 600.0,
         fmt("medians%s, ratios%s (band [0.35, 0.75]), %.1f s (limit 600 s)", medians.c_str(), ratios.c_str(), t));
}

void ac6() {
  const int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  for (const char* name : {"reflected-bm", "reflected-bump"}) {
    const auto start = Clock::now();
    regen::ExperimentConfig config;
    config.model = regen::builtin_preset(name);
    config.n = 5000;
    config.band.alpha = 0.10;
    config.replications = 200;
    config.base_seed = 1;
    config.workers = workers;
    const auto result = regen::run_coverage_experiment(config);
    const double t = seconds_since(start);
    const bool pass = !result.failed_experiment && result.coverage >= 0.85 && result.coverage <= 0.97 &&
                      result.equivalence_failures == 0;
    report("AC6", (std::string("uniform band coverage, ") + name).c_str(), pass,
           fmt("coverage %.3f (%zu/%zu, Wilson [%.3f, %.3f]), target [0.85, 0.97], %zu failed reps, "
               "%.1f s on %d worker(s) (limit 1800 s on 8)",
               result.coverage, result.covered, result.successes, result.wilson.first, result.wilson.second,
               result.failed, t, workers));
  }
}

void ac7() {
  const auto preset = regen::builtin_preset("reflected-bm");
  const auto traj = preset.simulate(10000, 71);

  const auto exact = regen::exact_split(traj, preset.model, 72);
  const auto same = regen::approximate_split(traj, regen::TransitionDensityEstimate::from_model(preset.model), 72);
  const bool identical = exact.flags == same.flags;

  regen::TransitionEstimateOptions options;
  options.theta = preset.model.theta();
  const auto estimated = regen::approximate_split(traj, regen::estimate_transition_density(traj, options), 72);
  const double rel = std::abs(estimated.flag_rate() - exact.flag_rate()) / exact.flag_rate();

  const auto default_theta = regen::estimate_transition_density(traj);
  const auto approx_default = regen::approximate_split(traj, default_theta, 72);
  const double rel_default = std::abs(approx_default.flag_rate() - exact.flag_rate()) / exact.flag_rate();

  report("AC7", "exact/approximate split agreement", identical && rel <= 0.10,
         fmt("p_hat = p flags %s; flag rate exact %.4f vs estimated %.4f, relative error %.4f (limit 0.10); "
             "with theta_hat = %.3f instead: %.4f",
             identical ? "bit-identical" : "DIFFER", exact.flag_rate(), estimated.flag_rate(), rel,
             default_theta.theta(), rel_default));
}

void ac8() {
  const auto start = Clock::now();
  std::mt19937_64 rng(81);
  std::size_t bad = 0;
  const std::size_t patterns = 10000;
  for (std::size_t p = 0; p < patterns; ++p) {
    const std::size_t n = 1 + rng() % 200;
    const double rate = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    std::bernoulli_distribution coin(rate);
    std::vector<double> samples(n);
    for (std::size_t t = 0; t < n; ++t) samples[t] = static_cast<double>(t);
    std::vector<std::uint8_t> flags(n);
    for (auto& f : flags) f = coin(rng) ? 1 : 0;
    const auto decomp = regen::extract_blocks(regen::SplitTrajectory::from_flags(samples, flags));

    std::vector<double> rebuilt(decomp.head().begin(), decomp.head().end());
    std::size_t lengths = 0;
    for (const auto& b : decomp.blocks()) {
      const auto v = decomp.values(b);
      rebuilt.insert(rebuilt.end(), v.begin(), v.end());
      lengths += b.length();
    }
    rebuilt.insert(rebuilt.end(), decomp.tail().begin(), decomp.tail().end());
    if (rebuilt != samples || lengths + decomp.head().size() + decomp.tail().size() != n) ++bad;
  }
  const double t = seconds_since(start);
  report("AC8", "decomposition soundness", bad == 0 && t < 5.0,
         fmt("%zu/%zu patterns violate reassembly or length sum, %.3f s (limit 5 s)", bad, patterns, t));
}

void ac9() {
  std::size_t cases = 0;
  std::size_t wrong = 0;
  const regen::ScalarFn V = [](double) { return 0.7; };
  for (const char* name : {"two-state-iid", "iid-uniform", "reflected-bm"}) {
    const auto preset = regen::builtin_preset(name);
    for (double c : {0.5, 1.0, 2.0, 3.0, 10.0}) {
      const double threshold = 2.0 / c;
      for (double rel : {-0.5, -1e-3, -1e-9, 0.0, 1e-9, 1e-3, 0.5}) {
        const double b = threshold * (1.0 + rel);
        const bool expected = b >= threshold;
        const bool got = regen::drift_check(preset.model, V, c, b).all_hold;
        ++cases;
        if (got != expected) ++wrong;
      }
    }
  }
  report("AC9", "drift checker", wrong == 0,
         fmt("constant V, S = full space: %zu/%zu (c, b) cases disagree with b >= 2/c", wrong, cases));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9};
  for (const auto& run : criteria) {
    try {
      run();
    } catch (const std::exception& e) {
      std::printf("FAIL error: %s\n", e.what());
      ++failures;
    }
  }
  std::printf("%d criterion line(s) failed\n", failures);
  return failures == 0 ? 0 : 3;
}
