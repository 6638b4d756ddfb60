#include "regen/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <omp.h>

#include "regen/error.hpp"
#include "regen/io.hpp"
#include "regen/oracle.hpp"
#include "regen/stats.hpp"

namespace regen {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ScalarFn piecewise_linear_cdf(const PiecewiseLinear& density) {
  const auto& grid = density.grid();
  const auto v = density.values();
  std::vector<double> cumulative(grid.size(), 0.0);
  for (std::size_t k = 1; k < grid.size(); ++k) {
    cumulative[k] = cumulative[k - 1] + 0.5 * grid.step() * (v[k - 1] + v[k]);
  }
  const double total = cumulative.back();
  std::vector<double> values(v.begin(), v.end());
  return [grid, values, cumulative, total](double x) {
    if (x <= grid.lo()) return 0.0;
    if (x >= grid.hi()) return 1.0;
    const auto [k, frac] = grid.locate(x);
    const double slope = values[k + 1] - values[k];
    const double partial = frac * grid.step() * (values[k] + 0.5 * slope * frac);
    return (cumulative[k] + partial) / total;
  };
}

ScalarFn finite_indicator(int state) {
  return [state](double x) { return static_cast<int>(std::lround(x)) == state ? 1.0 : 0.0; };
}

void require_finite(const ModelPreset& preset, const char* what) {
  if (preset.model.kind() != MarkovModel::Kind::kFinite) {
    throw Error(ErrorCode::kConfig, std::string(what) + " needs a finite-state preset with analytic pi and beta");
  }
}

BlockDecomposition exact_blocks(const ModelPreset& preset, std::size_t n, std::uint64_t seed) {
  const auto traj = preset.simulate(n, seed);
  return extract_blocks(exact_split(traj, preset.model, seed));
}

}  // namespace

BandConfig ExperimentConfig::band_for(std::size_t sample_size) const {
  BandConfig cfg = band;
  if (cfg.grid.empty()) {
    const double h = cfg.bandwidth_for(sample_size);
    const double margin = h * (1.0 + 1e-9);
    if (!(margin < 0.5)) throw Error(ErrorCode::kInvalidArgument, "bandwidth too large for a default band grid");
    cfg.grid = band_grid(margin, 1.0 - margin, grid_spacing_factor * h);
  }
  return cfg;
}

ExperimentConfig parse_experiment_config(const json& spec) {
  try {
    ExperimentConfig cfg;
    if (spec.contains("model")) cfg.model = parse_model(spec.at("model"));
    cfg.n = spec.value("n", cfg.n);
    if (spec.contains("x0")) cfg.x0 = spec.at("x0").get<double>();
    cfg.base_seed = spec.value("seed", cfg.base_seed);
    cfg.replications = spec.value("replications", cfg.replications);
    cfg.workers = spec.value("workers", cfg.workers);
    cfg.output_dir = spec.value("output_dir", cfg.output_dir.string());
    if (spec.contains("band")) {
      const auto& b = spec.at("band");
      cfg.band.alpha = b.value("alpha", cfg.band.alpha);
      cfg.band.reps = b.value("reps", cfg.band.reps);
      cfg.band.bandwidth_exponent = b.value("bandwidth_exponent", cfg.band.bandwidth_exponent);
      if (b.contains("h")) cfg.band.bandwidth = b.at("h").get<double>();
      if (b.contains("kernel")) cfg.band.kernel = parse_kernel(b.at("kernel").get<std::string>());
      cfg.band.sigma_floor = b.value("sigma_floor", cfg.band.sigma_floor);
      cfg.grid_spacing_factor = b.value("grid_spacing_factor", cfg.grid_spacing_factor);
      if (b.contains("grid")) {
        const auto& g = b.at("grid");
        if (g.is_array()) {
          cfg.band.grid = g.get<std::vector<double>>();
        } else {
          cfg.band.grid = band_grid(g.at("lo").get<double>(), g.at("hi").get<double>(), g.at("spacing").get<double>());
        }
      }
    }
    if (spec.contains("estimator")) {
      const auto& e = spec.at("estimator");
      cfg.estimator.grid_points = e.value("grid_points", cfg.estimator.grid_points);
      if (e.contains("h")) cfg.estimator.bandwidth = e.at("h").get<double>();
      if (e.contains("theta")) cfg.estimator.theta = e.at("theta").get<double>();
      cfg.estimator.cap = e.value("cap", cfg.estimator.cap);
    }
    if (spec.contains("diagnostics")) {
      const auto& d = spec.at("diagnostics");
      auto& dc = cfg.diagnostics;
      dc.delta_ns = d.value("delta_ns", dc.delta_ns);
      dc.delta_seeds = d.value("delta_seeds", dc.delta_seeds);
      dc.oracle_blocks = d.value("oracle_blocks", dc.oracle_blocks);
      dc.table_size = d.value("table_size", dc.table_size);
      dc.concentration_runs = d.value("concentration_runs", dc.concentration_runs);
      dc.ks_seeds = d.value("ks_seeds", dc.ks_seeds);
    }
    if (cfg.n < 2) throw Error(ErrorCode::kConfig, "n must be at least 2");
    if (cfg.workers < 1) throw Error(ErrorCode::kConfig, "workers must be at least 1");
    if (!(cfg.band.alpha > 0.0 && cfg.band.alpha < 1.0)) throw Error(ErrorCode::kConfig, "alpha must lie in (0, 1)");
    return cfg;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("experiment config: ") + e.what());
  }
}

ExperimentReport run_coverage_experiment(const ExperimentConfig& config) {
  if (config.replications == 0) throw Error(ErrorCode::kConfig, "replications must be positive");
  if (config.workers < 1) throw Error(ErrorCode::kConfig, "workers must be at least 1");
  if (!config.truth && !config.model.diffusion) {
    throw Error(ErrorCode::kConfig, "coverage needs a diffusion preset (or an explicit truth)");
  }
  const BandConfig band_config = config.band_for(config.n);
  validate_band_config(band_config, band_config.bandwidth_for(config.n));
  const double x0 = config.x0.value_or(config.model.x0);

  const auto start = Clock::now();
  ExperimentReport report;
  report.records.resize(config.replications);
  const auto reps = static_cast<long>(config.replications);

#pragma omp parallel for num_threads(config.workers) schedule(dynamic, 1)
  for (long r = 0; r < reps; ++r) {
    auto& rec = report.records[static_cast<std::size_t>(r)];
    rec.rep = static_cast<std::size_t>(r);
    rec.seed = config.replication_seed(rec.rep);
    const auto rep_start = Clock::now();
    try {
      const auto traj = config.model.simulate(config.n, x0, rec.seed);
      const auto p_hat = estimate_transition_density(traj, config.estimator);
      const auto band = build_band(traj, p_hat, band_config, rec.seed);
      const auto truth = config.truth ? config.truth(band) : config.model.true_density(band.grid);
      rec.covered = coverage_check(band, truth);
      rec.deviation = studentized_deviation(band, truth);
      rec.c_hat = band.c_hat;
      rec.equivalence_holds = rec.covered == (rec.deviation <= band.c_hat);
      rec.block_count = band.block_count;
      rec.beta_hat = band.beta_hat.value_or(0.0);
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
    }
    rec.runtime_seconds = seconds_since(rep_start);
  }

  for (const auto& rec : report.records) {
    if (!rec.ok) {
      ++report.failed;
      continue;
    }
    ++report.successes;
    if (rec.covered) ++report.covered;
    if (!rec.equivalence_holds) ++report.equivalence_failures;
  }
  report.coverage = report.successes ? static_cast<double>(report.covered) / static_cast<double>(report.successes) : 0.0;
  report.wilson = wilson_interval(report.covered, std::max<std::size_t>(report.successes, 1));
  report.failed_experiment = 10 * report.failed > config.replications;
  report.runtime_seconds = seconds_since(start);
  return report;
}

void write_experiment_report(const std::filesystem::path& dir, const ExperimentReport& report,
                             const ExperimentConfig& config) {
  io::ensure_writable_dir(dir);
  {
    std::ofstream out(dir / "records.csv", std::ios::binary | std::ios::trunc);
    out << "rep,seed,ok,covered,c_hat,deviation,i_n_hat,beta_hat,error\n";
    for (const auto& r : report.records) {
      std::string err = r.error;
      std::replace(err.begin(), err.end(), ',', ';');
      std::replace(err.begin(), err.end(), '\n', ' ');
      out << r.rep << ',' << r.seed << ',' << int(r.ok) << ',' << int(r.covered) << ',' << io::format_double(r.c_hat)
          << ',' << io::format_double(r.deviation) << ',' << r.block_count << ',' << io::format_double(r.beta_hat) << ','
          << err << '\n';
    }
  }
  {
    std::ofstream out(dir / "timings.csv", std::ios::binary | std::ios::trunc);
    out << "rep,runtime_seconds\n";
    for (const auto& r : report.records) out << r.rep << ',' << io::format_double(r.runtime_seconds) << '\n';
  }
  json summary;
  summary["model"] = config.model.name;
  summary["n"] = config.n;
  summary["alpha"] = config.band.alpha;
  summary["replications"] = config.replications;
  summary["base_seed"] = config.base_seed;
  summary["successes"] = report.successes;
  summary["failed"] = report.failed;
  summary["covered"] = report.covered;
  summary["coverage"] = report.coverage;
  summary["wilson_95"] = {report.wilson.first, report.wilson.second};
  summary["equivalence_failures"] = report.equivalence_failures;
  summary["failed_experiment"] = report.failed_experiment;
  io::write_json(dir / "summary.json", summary);
}

BlockMeanCheck block_mean_check(const ModelPreset& preset, int state, std::size_t n, std::uint64_t seed) {
  require_finite(preset, "block-mean check");
  const auto decomp = exact_blocks(preset, n, seed);
  if (decomp.block_count() < 2) throw Error(ErrorCode::kTooFewBlocks, "block-mean check needs at least two blocks");
  const auto f = finite_indicator(state);
  std::vector<double> sums;
  sums.reserve(decomp.block_count());
  for (const auto& b : decomp.blocks()) sums.push_back(block_sum(f, decomp.values(b)));
  const auto s = summarize(sums);
  const auto pi = finite_stationary(preset.model.matrix());
  BlockMeanCheck check;
  check.mean = s.mean;
  check.se = s.standard_error;
  check.blocks = decomp.block_count();
  check.target = finite_beta(preset.model) * pi(state);
  return check;
}

ConcentrationCheck block_count_concentration(const ModelPreset& preset, std::size_t n, std::size_t runs,
                                             std::uint64_t seed, double beta) {
  ConcentrationCheck c;
  c.beta = beta;
  c.scaled_deviations.resize(runs);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (std::size_t r = 0; r < runs; ++r) {
    const auto decomp = exact_blocks(preset, n, seed + r);
    c.scaled_deviations[r] = std::abs(static_cast<double>(decomp.block_count()) - static_cast<double>(n) / beta) / root_n;
  }
  c.max_scaled_deviation = runs ? *std::max_element(c.scaled_deviations.begin(), c.scaled_deviations.end()) : 0.0;
  return c;
}

FunctionTable diagnostic_table(const ModelPreset& preset, std::size_t k) {
  FunctionTable table;
  const bool two_state = preset.model.kind() == MarkovModel::Kind::kFinite && preset.model.matrix().rows() == 2;
  for (std::size_t j = 0; j < k; ++j) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(k);
    table.locations.push_back(static_cast<double>(j));
    if (two_state) {
      const double a = std::cos(angle);
      const double b = std::sin(angle);
      table.functions.emplace_back([a, b](double x) { return x < 0.5 ? a : b; });
    } else {
      const double freq = 2.0 * std::numbers::pi * static_cast<double>(j);
      table.functions.emplace_back([freq](double x) { return std::cos(freq * x) + std::sin(freq * x); });
    }
  }
  return table;
}

std::vector<double> finite_expectations(const MarkovModel& model, const FunctionTable& table) {
  const auto pi = finite_stationary(model.matrix());
  std::vector<double> out(table.size(), 0.0);
  for (std::size_t j = 0; j < table.size(); ++j) {
    for (Eigen::Index s = 0; s < pi.size(); ++s) out[j] += pi(s) * table.functions[j](static_cast<double>(s));
  }
  return out;
}

DeltaTable delta_decay(const ModelPreset& preset, const FunctionTable& table, const std::vector<std::size_t>& ns,
                       std::size_t seeds, std::uint64_t base_seed, std::size_t oracle_blocks) {
  require_finite(preset, "Delta decay");
  const auto centers = finite_expectations(preset.model, table);
  const auto blocks = simulate_independent_blocks(preset.model, oracle_blocks, base_seed ^ 0x0dac1e5eedULL);
  const auto moments = block_moments(blocks, table, centers);
  const double beta = finite_beta(preset.model);
  const auto centering = Centering::at(centers);

  DeltaTable out;
  for (std::size_t idx = 0; idx < ns.size(); ++idx) {
    DeltaRow row;
    row.n = ns[idx];
    row.deltas.resize(seeds);
    const auto count = static_cast<long>(seeds);
#pragma omp parallel for schedule(dynamic, 1)
    for (long s = 0; s < count; ++s) {
      const std::uint64_t seed = base_seed + 1000003ULL * (idx + 1) + static_cast<std::uint64_t>(s);
      const auto decomp = exact_blocks(preset, row.n, seed);
      row.deltas[static_cast<std::size_t>(s)] = delta_diagnostic(decomp, table, moments.second_moment, beta, centering);
    }
    row.median = median(row.deltas);
    out.rows.push_back(std::move(row));
  }
  out.monotone = true;
  for (std::size_t i = 1; i < out.rows.size(); ++i) {
    out.ratios.push_back(out.rows[i].median / out.rows[i - 1].median);
    if (!(out.rows[i].median < out.rows[i - 1].median)) out.monotone = false;
  }
  return out;
}

KsSummary regeneration_ks(const ModelPreset& preset, std::size_t n, std::size_t seeds, std::uint64_t base_seed) {
  if (preset.model.kind() != MarkovModel::Kind::kGrid) {
    throw Error(ErrorCode::kConfig, "KS of block first components needs a continuous model");
  }
  RegenerationOptions options;
  options.nu_cdf = piecewise_linear_cdf(preset.model.nu_table());
  KsSummary out;
  out.pvalues.resize(seeds);
  const auto count = static_cast<long>(seeds);
#pragma omp parallel for schedule(dynamic, 1)
  for (long s = 0; s < count; ++s) {
    const auto decomp = exact_blocks(preset, n, base_seed + static_cast<std::uint64_t>(s));
    const auto report = regeneration_diagnostics(decomp, options);
    out.pvalues[static_cast<std::size_t>(s)] = report.ks_pvalue.value_or(0.0);
  }
  out.passes = static_cast<std::size_t>(std::count_if(out.pvalues.begin(), out.pvalues.end(), [](double p) { return p > 0.01; }));
  out.pass_fraction = seeds ? static_cast<double>(out.passes) / static_cast<double>(seeds) : 0.0;
  return out;
}

json run_diagnostics(const ExperimentConfig& config) {
  const auto& preset = config.model;
  const auto& dc = config.diagnostics;
  json report;
  report["model"] = preset.name;
  report["n"] = config.n;
  report["seed"] = config.base_seed;

  const auto decomp = exact_blocks(preset, config.n, config.base_seed);
  RegenerationOptions options;
  const bool finite = preset.model.kind() == MarkovModel::Kind::kFinite;
  double beta = 0.0;
  if (finite) {
    beta = finite_beta(preset.model);
  } else {
    options.nu_cdf = piecewise_linear_cdf(preset.model.nu_table());
    beta = simulate_independent_blocks(preset.model, 100000, config.base_seed ^ 0xb10c5ULL).values.size() / 100000.0;
  }
  options.reference_beta = beta;
  report["beta"] = beta;
  report["beta_source"] = finite ? "analytic" : "independent blocks";
  report["beta_hat"] = decomp.beta_hat() ? json(*decomp.beta_hat()) : json(nullptr);
  report["regeneration"] = io::regeneration_json(regeneration_diagnostics(decomp, options));

  const auto conc = block_count_concentration(preset, config.n, dc.concentration_runs, config.base_seed + 7919, beta);
  report["block_count_concentration"] = {{"runs", dc.concentration_runs},
                                         {"max_scaled_deviation", conc.max_scaled_deviation},
                                         {"mean_scaled_deviation", summarize(conc.scaled_deviations).mean}};

  if (finite) {
    json means = json::array();
    for (Eigen::Index s = 0; s < preset.model.matrix().rows(); ++s) {
      const auto c = block_mean_check(preset, static_cast<int>(s), config.n, config.base_seed);
      means.push_back({{"state", s}, {"mean", c.mean}, {"se", c.se}, {"target", c.target}, {"z", c.z()},
                       {"within_3se", std::abs(c.z()) <= 3.0}});
    }
    report["block_mean_identity"] = means;
    const auto table = diagnostic_table(preset, dc.table_size);
    const auto delta = delta_decay(preset, table, dc.delta_ns, dc.delta_seeds, config.base_seed, dc.oracle_blocks);
    json rows = json::array();
    for (const auto& row : delta.rows) rows.push_back({{"n", row.n}, {"median_delta", row.median}});
    report["delta_decay"] = {{"rows", rows}, {"ratios", delta.ratios}, {"monotone", delta.monotone}};
  } else {
    const auto ks = regeneration_ks(preset, config.n, dc.ks_seeds, config.base_seed);
    report["regeneration_ks"] = {{"seeds", dc.ks_seeds}, {"passes", ks.passes}, {"pass_fraction", ks.pass_fraction},
                                 {"pvalues", ks.pvalues}};
  }
  return report;
}

}  // namespace regen
