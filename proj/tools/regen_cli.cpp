#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "regen/band.hpp"
#include "regen/error.hpp"
#include "regen/estimation.hpp"
#include "regen/experiment.hpp"
#include "regen/io.hpp"
#include "regen/splitting.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumeric = 2;
constexpr int kExitAcceptance = 3;

struct CommonOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<std::string> out;
  std::optional<int> workers;
};

struct Loaded {
  json spec;
  regen::ExperimentConfig config;
};

Loaded load(const CommonOptions& opts) {
  Loaded l;
  l.spec = opts.config.empty() ? json::object() : regen::io::read_json(opts.config);
  l.config = regen::parse_experiment_config(l.spec);
  if (const char* env = std::getenv("RB_SEED"); env != nullptr && *env != '\0') {
    try {
      l.config.base_seed = std::stoull(env);
    } catch (const std::exception&) {
      throw regen::Error(regen::ErrorCode::kConfig, std::string("RB_SEED is not an unsigned integer: ") + env);
    }
  }
  if (opts.seed) l.config.base_seed = *opts.seed;
  if (opts.reps) l.config.replications = *opts.reps;
  if (opts.out) l.config.output_dir = *opts.out;
  if (opts.workers) {
    if (*opts.workers < 1) throw regen::Error(regen::ErrorCode::kConfig, "--workers must be at least 1");
    l.config.workers = *opts.workers;
  }
  regen::io::ensure_writable_dir(l.config.output_dir);
  return l;
}

regen::Trajectory trajectory_for(const regen::ExperimentConfig& cfg, const std::string& input) {
  if (!input.empty()) return regen::io::read_trajectory(input);
  return cfg.model.simulate(cfg.n, cfg.x0.value_or(cfg.model.x0), cfg.base_seed);
}

int cmd_simulate(const CommonOptions& opts) {
  const auto l = load(opts);
  const auto traj = trajectory_for(l.config, "");
  regen::io::write_trajectory(l.config.output_dir / "trajectory.csv", traj);
  std::cout << "wrote " << traj.size() << " samples to " << (l.config.output_dir / "trajectory.csv").string() << '\n';
  return kExitOk;
}

int cmd_split(const CommonOptions& opts, const std::string& mode, const std::string& input) {
  const auto l = load(opts);
  const auto& cfg = l.config;
  const auto traj = trajectory_for(cfg, input);
  regen::SplitTrajectory split;
  if (mode == "exact") {
    split = regen::exact_split(traj, cfg.model.model, cfg.base_seed);
  } else if (mode == "approximate") {
    const auto p_hat = regen::estimate_transition_density(traj, cfg.estimator);
    regen::io::write_estimate(cfg.output_dir / "estimate.csv", p_hat);
    split = regen::approximate_split(traj, p_hat, cfg.base_seed);
  } else {
    throw regen::Error(regen::ErrorCode::kConfig, "--mode must be exact or approximate");
  }
  const auto decomp = regen::extract_blocks(split);
  regen::io::write_flags(cfg.output_dir / "flags.csv", split);
  regen::io::write_blocks(cfg.output_dir / "blocks.csv", decomp);
  regen::RegenerationOptions options;
  auto report = regen::io::regeneration_json(regen::regeneration_diagnostics(decomp, options));
  report["flag_rate"] = split.flag_rate();
  report["mode"] = mode;
  regen::io::write_json(cfg.output_dir / "diagnostics.json", report);
  std::cout << decomp.block_count() << " blocks, flag rate " << split.flag_rate() << '\n';
  return kExitOk;
}

int cmd_band(const CommonOptions& opts, const std::string& input) {
  const auto l = load(opts);
  const auto& cfg = l.config;
  const auto traj = trajectory_for(cfg, input);
  const auto p_hat = regen::estimate_transition_density(traj, cfg.estimator);
  const auto band = regen::build_band(traj, p_hat, cfg.band_for(traj.size()), cfg.base_seed);
  regen::io::write_estimate(cfg.output_dir / "estimate.csv", p_hat);
  regen::io::write_band(cfg.output_dir / "band.csv", band);
  regen::io::write_sup(cfg.output_dir / "sup.csv", band.sup);
  regen::io::write_json(cfg.output_dir / "band.json", regen::io::band_summary(band));
  std::cout << "c_hat = " << band.c_hat << ", " << band.block_count << " blocks, h = " << band.bandwidth << '\n';
  return kExitOk;
}

int cmd_coverage(const CommonOptions& opts) {
  const auto l = load(opts);
  const auto& cfg = l.config;
  const auto report = regen::run_coverage_experiment(cfg);
  regen::write_experiment_report(cfg.output_dir, report, cfg);
  std::cout << "coverage " << report.covered << "/" << report.successes << " = " << report.coverage << " (Wilson 95% ["
            << report.wilson.first << ", " << report.wilson.second << "]), " << report.failed << " failed\n";
  if (report.failed_experiment) {
    std::cerr << "more than 10% of the replications failed\n";
    return kExitNumeric;
  }
  if (l.spec.contains("acceptance") && l.spec.at("acceptance").contains("coverage")) {
    const auto range = l.spec.at("acceptance").at("coverage").get<std::vector<double>>();
    if (range.size() != 2) throw regen::Error(regen::ErrorCode::kConfig, "acceptance.coverage must be [lo, hi]");
    if (report.coverage < range[0] || report.coverage > range[1]) {
      std::cerr << "coverage outside [" << range[0] << ", " << range[1] << "]\n";
      return kExitAcceptance;
    }
  }
  return kExitOk;
}

int cmd_diagnostics(const CommonOptions& opts) {
  const auto l = load(opts);
  const auto report = regen::run_diagnostics(l.config);
  regen::io::write_json(l.config.output_dir / "diagnostics.json", report);
  std::cout << report.dump(2) << '\n';
  return kExitOk;
}

regen::ScalarFn lyapunov(const json& spec) {
  const auto kind = spec.value("kind", std::string("constant"));
  const double a = spec.value("a", 0.0);
  if (kind == "constant") return [a](double) { return a; };
  if (kind == "linear") return [a](double x) { return a * x; };
  if (kind == "quadratic") return [a](double x) { return a * x * x; };
  throw regen::Error(regen::ErrorCode::kConfig, "drift.V.kind must be constant, linear or quadratic");
}

int cmd_drift(const CommonOptions& opts) {
  const auto l = load(opts);
  if (!l.spec.contains("drift")) throw regen::Error(regen::ErrorCode::kConfig, "config needs a drift section");
  const auto& d = l.spec.at("drift");
  double c = 0.0;
  double b = 0.0;
  try {
    c = d.at("c").get<double>();
    b = d.at("b").get<double>();
  } catch (const json::exception& e) {
    throw regen::Error(regen::ErrorCode::kConfig, std::string("drift: ") + e.what());
  }
  const auto report = regen::drift_check(l.config.model.model, lyapunov(d.value("V", json::object())), c, b);
  {
    const auto path = l.config.output_dir / "drift.csv";
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << "x,lhs,rhs,holds\n";
    for (std::size_t i = 0; i < report.points.size(); ++i) {
      out << regen::io::format_double(report.points[i]) << ',' << regen::io::format_double(report.lhs[i]) << ','
          << regen::io::format_double(report.rhs[i]) << ',' << int(report.holds[i]) << '\n';
    }
  }
  std::cout << (report.all_hold ? "drift condition holds" : "drift condition fails") << " (max violation "
            << report.max_violation << ")\n";
  return report.all_hold ? kExitOk : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regenerative block bootstrap for Markov chains"};
  app.require_subcommand(1);
  CommonOptions opts;
  std::string mode = "exact";
  std::string input;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", opts.config, "JSON config file");
    sub->add_option("--seed", opts.seed, "base seed (overrides RB_SEED and the config)");
    sub->add_option("--reps", opts.reps, "replication count");
    sub->add_option("--out", opts.out, "output directory");
    sub->add_option("--workers", opts.workers, "parallel workers");
  };
  auto* simulate = app.add_subcommand("simulate", "simulate a trajectory");
  auto* split = app.add_subcommand("split", "split a trajectory and extract regeneration blocks");
  auto* band = app.add_subcommand("band", "uniform confidence band for the stationary density");
  auto* coverage = app.add_subcommand("coverage", "Monte Carlo coverage experiment");
  auto* diagnostics = app.add_subcommand("diagnostics", "block identity, block counts, Delta decay, KS");
  auto* drift = app.add_subcommand("drift-check", "geometric drift condition on the evaluation grid");
  for (auto* sub : {simulate, split, band, coverage, diagnostics, drift}) add_common(sub);
  split->add_option("--mode", mode, "exact or approximate")->check(CLI::IsMember({"exact", "approximate"}));
  split->add_option("--input", input, "trajectory CSV (t,x); simulated when omitted");
  band->add_option("--input", input, "trajectory CSV (t,x); simulated when omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*simulate) return cmd_simulate(opts);
    if (*split) return cmd_split(opts, mode, input);
    if (*band) return cmd_band(opts, input);
    if (*coverage) return cmd_coverage(opts);
    if (*diagnostics) return cmd_diagnostics(opts);
    if (*drift) return cmd_drift(opts);
  } catch (const regen::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    const bool config_error = e.code() == regen::ErrorCode::kConfig || e.code() == regen::ErrorCode::kInvalidArgument;
    return config_error ? kExitConfig : kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitConfig;
}
