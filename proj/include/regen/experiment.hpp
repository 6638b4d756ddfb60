#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "regen/band.hpp"
#include "regen/estimation.hpp"
#include "regen/presets.hpp"

namespace regen {

struct DiagnosticsConfig {
  std::vector<std::size_t> delta_ns{2500, 10000, 40000};
  std::size_t delta_seeds = 50;
  std::size_t oracle_blocks = 1000000;
  std::size_t table_size = 16;
  std::size_t concentration_runs = 100;
  std::size_t ks_seeds = 40;
};

struct ExperimentConfig {
  ModelPreset model = builtin_preset("reflected-bm");
  std::size_t n = 5000;
  std::optional<double> x0;
  BandConfig band;                   // empty grid: [h, 1 - h] with spacing h / 5
  double grid_spacing_factor = 0.2;  // spacing = factor * h for the default grid
  TransitionEstimateOptions estimator;
  std::size_t replications = 200;
  std::uint64_t base_seed = 1;
  int workers = 1;
  std::filesystem::path output_dir = "out";
  DiagnosticsConfig diagnostics;
  /// Density values on the band grid used as the truth; defaults to the
  /// stationary density of the (diffusion) model.
  std::function<std::vector<double>(const ConfidenceBand&)> truth;

  [[nodiscard]] std::uint64_t replication_seed(std::size_t rep) const noexcept { return base_seed + rep; }
  /// Band config with the default grid filled in for sample size n.
  [[nodiscard]] BandConfig band_for(std::size_t sample_size) const;
};

/// Parse an experiment config. Keys: model, n, x0, seed, replications, workers,
/// output_dir, band {alpha, reps, bandwidth_exponent, h, kernel, grid,
/// grid_spacing_factor, sigma_floor}, estimator {grid_points, h, theta, cap},
/// diagnostics {delta_ns, delta_seeds, oracle_blocks, table_size,
/// concentration_runs, ks_seeds}.
ExperimentConfig parse_experiment_config(const nlohmann::json& spec);

struct ReplicationRecord {
  std::size_t rep = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  bool covered = false;
  bool equivalence_holds = true;  // covered == (deviation <= c_hat)
  double c_hat = 0.0;
  double deviation = 0.0;  // sup_x sqrt(n) |pi_hat - pi| / sigma_hat
  std::size_t block_count = 0;
  double beta_hat = 0.0;
  double runtime_seconds = 0.0;
  std::string error;
};

struct ExperimentReport {
  std::vector<ReplicationRecord> records;
  std::size_t successes = 0;  // replications that ran to completion
  std::size_t covered = 0;
  double coverage = 0.0;      // covered / successes
  std::pair<double, double> wilson{0.0, 0.0};
  std::size_t failed = 0;
  bool failed_experiment = false;  // more than 10% of replications failed
  std::size_t equivalence_failures = 0;
  double runtime_seconds = 0.0;
};

/// Replication r simulates with seed base + r, estimates p_hat, builds the band
/// and checks coverage against the truth. Replications run on `workers`
/// threads; errors are recorded per replication.
ExperimentReport run_coverage_experiment(const ExperimentConfig& config);

/// records.csv (rep,seed,ok,covered,c_hat,deviation,i_n_hat,beta_hat,error),
/// summary.json and timings.csv (rep,runtime_seconds). Timings are kept apart so
/// that records.csv is reproducible byte for byte.
void write_experiment_report(const std::filesystem::path& dir, const ExperimentReport& report,
                             const ExperimentConfig& config);

// Diagnostics.

struct BlockMeanCheck {
  double mean = 0.0;    // mean of f-check(B_i)
  double se = 0.0;
  double target = 0.0;  // beta pi f
  std::size_t blocks = 0;
  [[nodiscard]] double z() const noexcept { return se > 0.0 ? (mean - target) / se : 0.0; }
};
/// Exact split of one trajectory of a finite model, f = indicator of `state`.
BlockMeanCheck block_mean_check(const ModelPreset& preset, int state, std::size_t n, std::uint64_t seed);

struct ConcentrationCheck {
  std::vector<double> scaled_deviations;  // |i_n - n / beta| / sqrt(n) per run
  double max_scaled_deviation = 0.0;
  double beta = 0.0;
};
ConcentrationCheck block_count_concentration(const ModelPreset& preset, std::size_t n, std::size_t runs,
                                             std::uint64_t seed, double beta);

/// f_j(0) = cos(2 pi j / k), f_j(1) = sin(2 pi j / k) on a two-state chain;
/// f_j(x) = cos(2 pi j x) + sin(2 pi j x) in general.
FunctionTable diagnostic_table(const ModelPreset& preset, std::size_t k);
/// pi f_j for a finite model.
std::vector<double> finite_expectations(const MarkovModel& model, const FunctionTable& table);

struct DeltaRow {
  std::size_t n = 0;
  std::vector<double> deltas;
  double median = 0.0;
};
struct DeltaTable {
  std::vector<DeltaRow> rows;
  std::vector<double> ratios;  // median(n_{k+1}) / median(n_k)
  bool monotone = false;
};
/// Delta diagnostic against a block-moment oracle from independent blocks,
/// centered at the true pi f of a finite model.
DeltaTable delta_decay(const ModelPreset& preset, const FunctionTable& table, const std::vector<std::size_t>& ns,
                       std::size_t seeds, std::uint64_t base_seed, std::size_t oracle_blocks);

struct KsSummary {
  std::vector<double> pvalues;
  std::size_t passes = 0;  // p > 0.01
  double pass_fraction = 0.0;
};
/// KS test of block first components against nu over `seeds` trajectories
/// (continuous models only).
KsSummary regeneration_ks(const ModelPreset& preset, std::size_t n, std::size_t seeds, std::uint64_t base_seed);

/// All diagnostics supported by the model as a JSON report.
nlohmann::json run_diagnostics(const ExperimentConfig& config);

}  // namespace regen
