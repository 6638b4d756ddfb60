#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "regen/chain.hpp"

namespace regen {

class TransitionDensityEstimate;

enum class SplitMode { kExact, kApproximate };

/// Observed states plus the Bernoulli regeneration flags of the split chain.
///
/// flags[t] is Y_t, drawn from (X_t, X_{t+1}); the last sample therefore has no
/// flag and flags.size() == samples.size() - 1 for split outputs. A regeneration
/// is a visit to the atom S x {1}, i.e. flags[t] == 1 with X_t in S.
struct SplitTrajectory {
  std::vector<double> samples;
  std::vector<std::uint8_t> flags;
  std::vector<std::uint8_t> in_small_set;
  SplitMode mode = SplitMode::kExact;
  std::uint64_t seed = 0;

  /// Hand-built flag patterns (S = whole space). flags.size() may equal
  /// samples.size() in this case.
  static SplitTrajectory from_flags(std::vector<double> samples, std::vector<std::uint8_t> flags);

  [[nodiscard]] bool regenerates(std::size_t t) const noexcept { return flags[t] != 0 && in_small_set[t] != 0; }
  [[nodiscard]] double flag_rate() const noexcept;
};

/// Flags drawn with the true transition density of `model` (m = 1).
SplitTrajectory exact_split(const Trajectory& traj, const MarkovModel& model, std::uint64_t seed);

/// Flags drawn with the clipped estimate in place of p; S, theta and nu are the
/// ones the estimate was clipped against.
SplitTrajectory approximate_split(const Trajectory& traj, const TransitionDensityEstimate& p_hat, std::uint64_t seed);

/// Positions [start, end] (inclusive) of one regeneration block.
struct Block {
  std::size_t start = 0;
  std::size_t end = 0;
  [[nodiscard]] std::size_t length() const noexcept { return end - start + 1; }
};

/// Head, blocks B_1..B_k and tail of a split trajectory. With regeneration
/// times sigma(0) < sigma(1) < ..., B_i covers sigma(i-1)+1 .. sigma(i), the
/// head covers 0 .. sigma(0) and the tail sigma(k)+1 .. n-1.
class BlockDecomposition {
 public:
  BlockDecomposition() = default;
  BlockDecomposition(std::vector<double> samples, std::vector<Block> blocks, std::size_t head_length);

  [[nodiscard]] std::span<const double> samples() const noexcept { return samples_; }
  [[nodiscard]] std::size_t sample_count() const noexcept { return samples_.size(); }
  [[nodiscard]] const std::vector<Block>& blocks() const noexcept { return blocks_; }
  [[nodiscard]] std::size_t block_count() const noexcept { return blocks_.size(); }
  [[nodiscard]] bool empty() const noexcept { return blocks_.empty(); }
  [[nodiscard]] std::span<const double> values(const Block& b) const noexcept {
    return std::span<const double>(samples_).subspan(b.start, b.length());
  }
  [[nodiscard]] std::span<const double> head() const noexcept { return std::span<const double>(samples_).first(head_length_); }
  [[nodiscard]] std::span<const double> tail() const noexcept;
  /// n / block_count; empty when there are no blocks.
  [[nodiscard]] std::optional<double> beta_hat() const noexcept;

 private:
  std::vector<double> samples_;
  std::vector<Block> blocks_;
  std::size_t head_length_ = 0;
};

BlockDecomposition extract_blocks(const SplitTrajectory& split);

struct RegenerationReport {
  bool available = false;  // false when fewer than min_blocks blocks
  std::size_t block_count = 0;
  std::optional<double> ks_statistic;   // first components vs nu
  std::optional<double> ks_pvalue;
  double lag1_length_correlation = 0.0;
  double mean_block_length = 0.0;
  double block_length_se = 0.0;
  std::optional<double> count_deviation;  // |i_n - n / beta_ref| / sqrt(n)
  std::map<std::size_t, std::size_t> length_histogram;
};

struct RegenerationOptions {
  ScalarFn nu_cdf;                       // CDF of nu; KS is skipped when empty
  std::optional<double> reference_beta;  // beta for the block-count deviation
  std::size_t min_blocks = 30;
};

RegenerationReport regeneration_diagnostics(const BlockDecomposition& decomp, const RegenerationOptions& options = {});

}  // namespace regen
