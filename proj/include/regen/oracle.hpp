#pragma once

// Reference quantities computed without the trajectory -> split -> blocks
// pipeline: blocks simulated directly from the split-chain construction and
// stationary laws of finite chains.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "regen/chain.hpp"
#include "regen/estimation.hpp"

namespace regen {

/// Blocks drawn independently by running the split chain from nu until its next
/// visit to the atom: X ~ nu; while not (X in S and U < theta), move X by the
/// residual kernel (X in S) or by p (X not in S).
struct IndependentBlocks {
  std::vector<double> values;        // concatenated block values
  std::vector<std::size_t> offsets;  // block i spans [offsets[i], offsets[i+1])

  [[nodiscard]] std::size_t count() const noexcept { return offsets.empty() ? 0 : offsets.size() - 1; }
  [[nodiscard]] std::span<const double> block(std::size_t i) const {
    return std::span<const double>(values).subspan(offsets[i], offsets[i + 1] - offsets[i]);
  }
};

IndependentBlocks simulate_independent_blocks(const MarkovModel& model, std::size_t count, std::uint64_t seed);

struct BlockMoments {
  Eigen::MatrixXd second_moment;  // E[f°-check(B) g°-check(B)], centered at `centers`
  Eigen::VectorXd mean_sum;       // E[f-check(B)]
  double mean_length = 0.0;       // beta
};

/// Block moments of a function table over independent blocks, centered at
/// `centers` (typically the true pi f).
BlockMoments block_moments(const IndependentBlocks& blocks, const FunctionTable& table, std::span<const double> centers);

/// Stationary vector of a finite chain (solves pi P = pi, sum pi = 1).
Eigen::VectorXd finite_stationary(const Eigen::MatrixXd& transition);

/// beta = E[block length] = 1 / (theta pi(S)) for an m = 1 split chain.
double finite_beta(const MarkovModel& model);

}  // namespace regen
