#include "regen/band.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "regen/error.hpp"

namespace regen {

namespace {

constexpr std::size_t kMinBlocks = 30;

void fill_envelopes(ConfidenceBand& band) {
  const double root_n = std::sqrt(static_cast<double>(band.n));
  band.lower.resize(band.grid.size());
  band.upper.resize(band.grid.size());
  for (std::size_t j = 0; j < band.grid.size(); ++j) {
    const double half = band.c_hat * band.sigma_hat[j] / root_n;
    band.lower[j] = band.estimate[j] - half;
    band.upper[j] = band.estimate[j] + half;
  }
}

}  // namespace

double BandConfig::bandwidth_for(std::size_t n) const {
  if (bandwidth) return *bandwidth;
  return std::pow(static_cast<double>(n), -bandwidth_exponent);
}

std::vector<double> band_grid(double lo, double hi, double max_spacing) {
  if (!(hi > lo) || !(max_spacing > 0.0)) throw Error(ErrorCode::kInvalidArgument, "band grid needs hi > lo, spacing > 0");
  const auto cells = static_cast<std::size_t>(std::ceil((hi - lo) / max_spacing - 1e-12));
  return UniformGrid(lo, hi, std::max<std::size_t>(cells, 1) + 1).nodes();
}

void validate_band_config(const BandConfig& config, double bandwidth) {
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
  if (config.grid.empty()) throw Error(ErrorCode::kInvalidArgument, "band grid is empty");
  if (!(bandwidth > 0.0)) throw Error(ErrorCode::kInvalidArgument, "bandwidth must be positive");
  const double margin = KernelSpec::support() * bandwidth;
  for (double x : config.grid) {
    if (!(x - margin >= 0.0 && x + margin <= 1.0)) {
      std::ostringstream msg;
      msg << "grid point " << x << " is closer than h = " << bandwidth << " to the boundary";
      throw Error(ErrorCode::kInvalidArgument, msg.str());
    }
  }
}

double ConfidenceBand::half_width(std::size_t j) const {
  return c_hat * sigma_hat[j] / std::sqrt(static_cast<double>(n));
}

double sigma_hat(const BlockDecomposition& decomp, const KernelSpec& kernel, double x, double kde_value,
                 double sigma_floor) {
  if (decomp.empty()) throw Error(ErrorCode::kNoBlocks, "sigma_hat needs at least one block");
  const double inv_n = 1.0 / static_cast<double>(decomp.sample_count());
  double acc = 0.0;
  for (const auto& b : decomp.blocks()) {
    double s = 0.0;
    for (double v : decomp.values(b)) s += kernel.scaled(x, v);
    const double c = s - static_cast<double>(b.length()) * kde_value;
    acc += c * c;
  }
  const double sigma = std::sqrt(acc * inv_n);
  if (!(sigma >= sigma_floor)) {
    std::ostringstream msg;
    msg << "sigma_hat = " << sigma << " below floor at x = " << x;
    throw Error(ErrorCode::kDegenerateStudentizer, msg.str());
  }
  return sigma;
}

ConfidenceBand build_band(const BlockDecomposition& decomp, const BandConfig& config, std::uint64_t seed) {
  if (decomp.block_count() < kMinBlocks) {
    std::ostringstream msg;
    msg << decomp.block_count() << " blocks; the band needs at least " << kMinBlocks;
    throw Error(ErrorCode::kTooFewBlocks, msg.str());
  }
  const std::size_t n = decomp.sample_count();
  const double h = config.bandwidth_for(n);
  validate_band_config(config, h);
  const KernelSpec kernel{config.kernel, h};

  ConfidenceBand band;
  band.grid = config.grid;
  band.alpha = config.alpha;
  band.bandwidth = h;
  band.n = n;
  band.block_count = decomp.block_count();
  band.beta_hat = decomp.beta_hat();
  band.estimate = kde(decomp.samples(), kernel, band.grid);

  const auto table = FunctionTable::kernel_table(kernel, band.grid);
  const auto centered = centered_block_sums(block_sums(decomp, table), Centering::at(band.estimate));
  const Eigen::MatrixXd gamma = empirical_covariance(centered, n);
  band.sigma_hat.resize(band.grid.size());
  for (std::size_t j = 0; j < band.grid.size(); ++j) {
    const double s = std::sqrt(gamma(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)));
    if (!(s >= config.sigma_floor)) {
      std::ostringstream msg;
      msg << "sigma_hat = " << s << " below floor at x = " << band.grid[j];
      throw Error(ErrorCode::kDegenerateStudentizer, msg.str());
    }
    band.sigma_hat[j] = s;
  }

  // Studentized class f_x = w_{x,h} / sigma_hat(x), centered at pi_hat f_x.
  const auto studentized = table.scaled(band.sigma_hat);
  std::vector<double> pi_hat(band.grid.size());
  for (std::size_t j = 0; j < pi_hat.size(); ++j) pi_hat[j] = band.estimate[j] / band.sigma_hat[j];
  const auto draws = wild_bootstrap_draws(decomp, studentized, pi_hat, config.reps, seed);
  band.sup = sup_statistic(draws, SupMode::kAbsolute);
  band.c_hat = bootstrap_quantile(band.sup, config.alpha);
  fill_envelopes(band);
  return band;
}

ConfidenceBand build_band(const Trajectory& traj, const TransitionDensityEstimate& p_hat, const BandConfig& config,
                          std::uint64_t seed) {
  const auto split = approximate_split(traj, p_hat, seed);
  return build_band(extract_blocks(split), config, seed);
}

ConfidenceBand with_alpha(const ConfidenceBand& band, double alpha) {
  ConfidenceBand out = band;
  out.alpha = alpha;
  out.c_hat = bootstrap_quantile(band.sup, alpha);
  fill_envelopes(out);
  return out;
}

bool coverage_check(const ConfidenceBand& band, std::span<const double> truth) {
  if (truth.size() != band.grid.size()) throw Error(ErrorCode::kGridMismatch, "truth must be given on the band grid");
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (!(band.lower[j] <= truth[j] && truth[j] <= band.upper[j])) return false;
  }
  return true;
}

double studentized_deviation(const ConfidenceBand& band, std::span<const double> truth) {
  if (truth.size() != band.grid.size()) throw Error(ErrorCode::kGridMismatch, "truth must be given on the band grid");
  const double root_n = std::sqrt(static_cast<double>(band.n));
  double sup = 0.0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    sup = std::max(sup, root_n * std::abs(band.estimate[j] - truth[j]) / band.sigma_hat[j]);
  }
  return sup;
}

}  // namespace regen
