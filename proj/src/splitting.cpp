#include "regen/splitting.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "regen/error.hpp"
#include "regen/estimation.hpp"
#include "regen/rng.hpp"
#include "regen/stats.hpp"

namespace regen {

namespace {

// Success probability above 1 by no more than this is rounding noise.
constexpr double kClampSlack = 1e-9;

/// Draw Y_t for t = 0..n-2: Bern(theta) when X_t is outside S, otherwise
/// Bern(theta nu'(X_{t+1}) / density(X_t, X_{t+1})). One uniform per index, so
/// the same seed gives the same stream whatever the densities are.
template <class Density>
SplitTrajectory draw_flags(const Trajectory& traj, const Density& density, const SmallSet& small_set, double theta,
                           const auto& nu, std::uint64_t seed, SplitMode mode, ErrorCode zero_code,
                           ErrorCode excess_code) {
  SplitTrajectory split;
  split.samples = traj.samples;
  split.mode = mode;
  split.seed = seed;
  const std::size_t n = traj.samples.size();
  const std::size_t m = n == 0 ? 0 : n - 1;
  split.flags.resize(m);
  split.in_small_set.resize(m);

  Rng rng = make_stream(seed, Stream::kSplitFlags);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t t = 0; t < m; ++t) {
    const double x = traj.samples[t];
    const double y = traj.samples[t + 1];
    const double u = unif(rng);
    const bool in_s = small_set.contains(x);
    split.in_small_set[t] = in_s ? 1 : 0;
    double prob = theta;
    if (in_s) {
      const double p = density(x, y);
      if (!(p > 0.0)) {
        std::ostringstream msg;
        msg << "density is " << p << " at observed transition t = " << t << " (" << x << " -> " << y << ")";
        throw Error(zero_code, msg.str());
      }
      prob = theta * nu(y) / p;
      if (prob > 1.0) {
        if (prob > 1.0 + kClampSlack) {
          std::ostringstream msg;
          msg << "success probability " << prob << " > 1 at t = " << t;
          throw Error(excess_code, msg.str());
        }
        prob = 1.0;
      }
    }
    split.flags[t] = u < prob ? 1 : 0;
  }
  return split;
}

}  // namespace

SplitTrajectory SplitTrajectory::from_flags(std::vector<double> samples, std::vector<std::uint8_t> flags) {
  if (flags.size() > samples.size()) throw Error(ErrorCode::kInvalidArgument, "more flags than samples");
  SplitTrajectory s;
  s.samples = std::move(samples);
  s.in_small_set.assign(flags.size(), 1);
  s.flags = std::move(flags);
  return s;
}

double SplitTrajectory::flag_rate() const noexcept {
  if (flags.empty()) return 0.0;
  return static_cast<double>(std::accumulate(flags.begin(), flags.end(), std::size_t{0})) /
         static_cast<double>(flags.size());
}

SplitTrajectory exact_split(const Trajectory& traj, const MarkovModel& model, std::uint64_t seed) {
  if (model.period() != 1) throw Error(ErrorCode::kInvalidArgument, "split sampling supports m = 1 only");
  auto density = [&](double x, double y) { return model.transition_density(x, y); };
  auto nu = [&](double y) { return model.nu_density(y); };
  return draw_flags(traj, density, model.small_set(), model.theta(), nu, seed, SplitMode::kExact,
                    ErrorCode::kImpossibleTransition, ErrorCode::kMinorizationViolation);
}

SplitTrajectory approximate_split(const Trajectory& traj, const TransitionDensityEstimate& p_hat, std::uint64_t seed) {
  auto nu = [&](double y) { return p_hat.nu_density(y); };
  return draw_flags(traj, p_hat, p_hat.small_set(), p_hat.theta(), nu, seed, SplitMode::kApproximate,
                    ErrorCode::kClippingViolation, ErrorCode::kClippingViolation);
}

BlockDecomposition::BlockDecomposition(std::vector<double> samples, std::vector<Block> blocks, std::size_t head_length)
    : samples_(std::move(samples)), blocks_(std::move(blocks)), head_length_(head_length) {}

std::span<const double> BlockDecomposition::tail() const noexcept {
  const std::size_t covered = blocks_.empty() ? head_length_ : blocks_.back().end + 1;
  return std::span<const double>(samples_).subspan(covered);
}

std::optional<double> BlockDecomposition::beta_hat() const noexcept {
  if (blocks_.empty()) return std::nullopt;
  return static_cast<double>(samples_.size()) / static_cast<double>(blocks_.size());
}

BlockDecomposition extract_blocks(const SplitTrajectory& split) {
  std::vector<Block> blocks;
  std::optional<std::size_t> previous;
  std::size_t head_length = split.samples.size();
  for (std::size_t t = 0; t < split.flags.size(); ++t) {
    if (!split.regenerates(t)) continue;
    if (previous) {
      blocks.push_back({*previous + 1, t});
    } else {
      head_length = t + 1;
    }
    previous = t;
  }
  return {split.samples, std::move(blocks), head_length};
}

RegenerationReport regeneration_diagnostics(const BlockDecomposition& decomp, const RegenerationOptions& options) {
  RegenerationReport report;
  report.block_count = decomp.block_count();
  std::vector<double> lengths;
  std::vector<double> first;
  lengths.reserve(decomp.block_count());
  for (const auto& b : decomp.blocks()) {
    lengths.push_back(static_cast<double>(b.length()));
    first.push_back(decomp.values(b).front());
    ++report.length_histogram[b.length()];
  }
  if (!lengths.empty()) {
    const auto s = summarize(lengths);
    report.mean_block_length = s.mean;
    report.block_length_se = s.standard_error;
  }
  if (options.reference_beta && *options.reference_beta > 0.0 && decomp.sample_count() > 0) {
    const double n = static_cast<double>(decomp.sample_count());
    report.count_deviation = std::abs(static_cast<double>(decomp.block_count()) - n / *options.reference_beta) / std::sqrt(n);
  }
  report.available = decomp.block_count() >= options.min_blocks;
  if (!report.available) return report;
  report.lag1_length_correlation = lag1_correlation(lengths);
  if (options.nu_cdf) {
    const auto ks = ks_one_sample(first, options.nu_cdf);
    report.ks_statistic = ks.statistic;
    report.ks_pvalue = ks.pvalue;
  }
  return report;
}

}  // namespace regen
