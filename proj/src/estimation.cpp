#include "regen/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "regen/error.hpp"
#include "regen/kernels.hpp"

namespace regen {

KernelType parse_kernel(const std::string& name) {
  if (name == "triangular") return KernelType::kTriangular;
  if (name == "epanechnikov") return KernelType::kEpanechnikov;
  throw Error(ErrorCode::kConfig, "unknown kernel '" + name + "'");
}

std::string to_string(KernelType type) {
  return type == KernelType::kTriangular ? "triangular" : "epanechnikov";
}

bool FunctionTable::envelope_dominates(std::span<const double> points) const {
  if (!envelope) return false;
  for (double x : points) {
    const double e = envelope(x);
    for (const auto& f : functions) {
      if (std::abs(f(x)) > e) return false;
    }
  }
  return true;
}

FunctionTable FunctionTable::kernel_table(const KernelSpec& kernel, std::span<const double> locations) {
  if (!(kernel.bandwidth > 0.0)) throw Error(ErrorCode::kInvalidArgument, "kernel bandwidth must be positive");
  FunctionTable table;
  table.locations.assign(locations.begin(), locations.end());
  for (double x : locations) {
    table.functions.emplace_back([kernel, x](double y) { return kernel.scaled(x, y); });
  }
  const double peak = kernel.peak() / kernel.bandwidth;
  table.envelope = [peak](double) { return peak; };
  return table;
}

FunctionTable FunctionTable::scaled(std::span<const double> scale) const {
  if (scale.size() != functions.size()) throw Error(ErrorCode::kDimensionMismatch, "one scale per function required");
  FunctionTable out;
  out.locations = locations;
  double worst = 0.0;
  for (std::size_t j = 0; j < functions.size(); ++j) {
    out.functions.emplace_back([f = functions[j], s = scale[j]](double y) { return f(y) / s; });
    worst = std::max(worst, 1.0 / std::abs(scale[j]));
  }
  if (envelope) out.envelope = [e = envelope, worst](double y) { return e(y) * worst; };
  return out;
}

// Transition density ---------------------------------------------------------

TransitionDensityEstimate::TransitionDensityEstimate(GridDensity values, double bandwidth, double theta,
                                                     SmallSet small_set, ScalarFn nu, double cap,
                                                     std::size_t n_source, std::string boundary_correction)
    : values_(std::move(values)),
      bandwidth_(bandwidth),
      theta_(theta),
      small_set_(std::move(small_set)),
      nu_(std::move(nu)),
      cap_(cap),
      n_source_(n_source),
      boundary_correction_(std::move(boundary_correction)) {}

TransitionDensityEstimate TransitionDensityEstimate::from_model(const MarkovModel& model) {
  const auto& density = model.density();
  const auto& axis = density.axis();
  double nu_max = 0.0;
  for (std::size_t j = 0; j < axis.size(); ++j) nu_max = std::max(nu_max, model.nu_density(axis.at(j)));
  const double cap = 2.0 * std::max(density.max_value(), model.theta() * nu_max);
  return {density, 0.0, model.theta(), model.small_set(), [model](double y) { return model.nu_density(y); },
          cap, 0, "none (model density)"};
}

bool TransitionDensityEstimate::satisfies_invariants() const {
  const auto& axis = values_.axis();
  for (std::size_t i = 0; i < axis.size(); ++i) {
    const bool row_in_s = small_set_.contains(axis.at(i));
    for (std::size_t j = 0; j < axis.size(); ++j) {
      const double v = values_.at(i, j);
      if (!(v > 0.0) || v > cap_) return false;
      const double y = axis.at(j);
      if (row_in_s && small_set_.contains(y) && v < theta_ * nu_(y) * (1.0 - 1e-12)) return false;
    }
  }
  return true;
}

TransitionDensityEstimate estimate_transition_density(const Trajectory& traj, const TransitionEstimateOptions& options) {
  const std::size_t n = traj.size();
  if (n < 50) throw Error(ErrorCode::kInvalidArgument, "transition density estimation needs n >= 50");
  const double h = options.bandwidth.value_or(std::pow(static_cast<double>(n), -1.0 / 6.0));
  if (!(h > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bandwidth must be positive");
  if (options.grid_points < 3) throw Error(ErrorCode::kInvalidArgument, "estimator grid needs >= 3 points");
  for (double x : traj.samples) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "transition estimator expects states in [0,1]");
  }
  const ScalarFn nu = options.nu_density ? options.nu_density : ScalarFn([](double) { return 1.0; });
  const UniformGrid axis(0.0, 1.0, options.grid_points);
  const std::size_t g = axis.size();

  const std::span<const double> all(traj.samples);
  Eigen::MatrixXd joint;
  Eigen::VectorXd marginal;
  kernels::omp::pair_kde(all.first(n - 1), all.subspan(1), h, axis, joint, marginal);

  std::vector<double> raw(g * g, 0.0);
  for (std::size_t i = 0; i < g; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (marginal(ii) > 0.0) {
      for (std::size_t j = 0; j < g; ++j) raw[i * g + j] = joint(ii, static_cast<Eigen::Index>(j)) / marginal(ii);
      continue;
    }
    const double lo = axis.at(i == 0 ? 0 : i - 1);
    const double hi = axis.at(std::min(i + 1, g - 1));
    for (std::size_t t = 0; t + 1 < n; ++t) {
      if (traj.samples[t] > lo && traj.samples[t] < hi) {
        std::ostringstream msg;
        msg << "marginal KDE vanishes next to observed state " << traj.samples[t];
        throw Error(ErrorCode::kDegenerateMarginal, msg.str());
      }
    }
  }

  double theta = 0.0;
  if (options.theta) {
    theta = *options.theta;
  } else {
    double floor = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g; ++i) {
      if (!options.small_set.contains(axis.at(i))) continue;
      for (std::size_t j = 0; j < g; ++j) {
        if (options.small_set.contains(axis.at(j))) floor = std::min(floor, raw[i * g + j]);
      }
    }
    theta = 0.9 * std::min(floor, options.cap);
  }
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw Error(ErrorCode::kClippingViolation, "theta must lie in (0, 1]; the raw estimate has no positive floor");
  }
  double max_floor = 0.0;
  for (std::size_t j = 0; j < g; ++j) max_floor = std::max(max_floor, theta * nu(axis.at(j)));
  if (!(options.cap > max_floor)) throw Error(ErrorCode::kInvalidCap, "R must exceed max theta nu'");

  // Strict positivity off S, where no floor applies.
  constexpr double kPositive = 1e-12;
  std::vector<double> clipped(g * g);
  for (std::size_t i = 0; i < g; ++i) {
    const bool row_in_s = options.small_set.contains(axis.at(i));
    for (std::size_t j = 0; j < g; ++j) {
      double v = raw[i * g + j];
      if (row_in_s) v = std::max(v, theta * nu(axis.at(j)));
      clipped[i * g + j] = std::max(std::min(v, options.cap), kPositive);
    }
  }
  return {GridDensity(axis, std::move(clipped)), h, theta, options.small_set, nu, options.cap, n, "reflection"};
}

// Kernel estimates and block functionals ------------------------------------

double block_sum(const ScalarFn& f, std::span<const double> block) {
  double acc = 0.0;
  for (std::size_t k = 0; k < block.size(); ++k) {
    const double v = f(block[k]);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "function value is not finite at block position " << k;
      throw Error(ErrorCode::kNumeric, msg.str());
    }
    acc += v;
  }
  return acc;
}

double empirical_mean(std::span<const double> samples, const ScalarFn& f) {
  if (samples.empty()) throw Error(ErrorCode::kInvalidArgument, "empirical mean needs n >= 1");
  double acc = 0.0;
  for (double x : samples) acc += f(x);
  if (!std::isfinite(acc)) throw Error(ErrorCode::kNumeric, "empirical mean is not finite");
  return acc / static_cast<double>(samples.size());
}

double kde(std::span<const double> samples, const KernelSpec& kernel, double x) {
  if (!(kernel.bandwidth > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bandwidth must be positive");
  double out = 0.0;
  kernels::serial::kde_grid(samples, kernel, std::span<const double>(&x, 1), std::span<double>(&out, 1));
  return out;
}

std::vector<double> kde(std::span<const double> samples, const KernelSpec& kernel, std::span<const double> points) {
  if (!(kernel.bandwidth > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bandwidth must be positive");
  std::vector<double> out(points.size());
  kernels::omp::kde_grid(samples, kernel, points, out);
  return out;
}

BlockSums block_sums(const BlockDecomposition& decomp, const FunctionTable& table) {
  BlockSums out;
  out.sample_count = decomp.sample_count();
  kernels::omp::block_sums(decomp.samples(), decomp.blocks(), table, out.sums);
  if (!out.sums.allFinite()) throw Error(ErrorCode::kNumeric, "block sums are not finite");
  out.lengths.reserve(decomp.block_count());
  for (const auto& b : decomp.blocks()) out.lengths.push_back(static_cast<double>(b.length()));
  return out;
}

Eigen::MatrixXd centered_block_sums(const BlockSums& sums, const Centering& centering) {
  Eigen::MatrixXd c = sums.sums;
  if (!centering.active()) return c;
  const auto& centers = centering.centers();
  if (static_cast<Eigen::Index>(centers.size()) != c.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "one center per table function required");
  }
  for (Eigen::Index i = 0; i < c.cols(); ++i) {
    const double len = sums.lengths[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < c.rows(); ++j) c(j, i) -= len * centers[static_cast<std::size_t>(j)];
  }
  return c;
}

Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& centered, std::size_t n) {
  if (centered.cols() == 0) throw Error(ErrorCode::kNoBlocks, "empirical covariance needs at least one block");
  Eigen::MatrixXd out;
  kernels::omp::block_covariance(centered, n, out);
  return out;
}

Eigen::MatrixXd empirical_covariance(const BlockDecomposition& decomp, const FunctionTable& table,
                                     const Centering& centering) {
  if (decomp.empty()) throw Error(ErrorCode::kNoBlocks, "empirical covariance needs at least one block");
  const auto sums = block_sums(decomp, table);
  return empirical_covariance(centered_block_sums(sums, centering), decomp.sample_count());
}

double delta_diagnostic(const BlockDecomposition& decomp, const FunctionTable& table, const Eigen::MatrixXd& oracle_cov,
                        double beta, const Centering& centering) {
  const auto g = static_cast<Eigen::Index>(table.size());
  if (oracle_cov.rows() != g || oracle_cov.cols() != g) {
    throw Error(ErrorCode::kDimensionMismatch, "oracle covariance must be G x G for a G-function table");
  }
  if (!(beta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "beta must be positive");
  const Eigen::MatrixXd gamma = empirical_covariance(decomp, table, centering);
  return (oracle_cov / beta - gamma).cwiseAbs().maxCoeff();
}

}  // namespace regen
