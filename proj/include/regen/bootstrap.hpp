#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "regen/estimation.hpp"
#include "regen/splitting.hpp"

namespace regen {

/// Gaussian wild regenerative block bootstrap draws, one row per replication:
/// G(f) = n^{-1/2} sum_i zeta_i (f-check(B_i) - l(B_i) pi_hat f).
struct BootstrapDraws {
  Eigen::MatrixXd values;        // reps x G
  std::uint64_t seed = 0;
  std::vector<double> centering;  // pi_hat f per function
};

BootstrapDraws wild_bootstrap_draws(const BlockDecomposition& decomp, const FunctionTable& table,
                                    const std::vector<double>& pi_hat, std::size_t reps, std::uint64_t seed);

/// Same draws from precomputed centered block sums (G x k) and n.
BootstrapDraws wild_bootstrap_draws(const Eigen::MatrixXd& centered, std::size_t n, std::size_t reps,
                                    std::uint64_t seed);

enum class SupMode { kSigned, kAbsolute };

struct SupStatistic {
  std::vector<double> values;
  SupMode mode = SupMode::kSigned;
};

/// Per-row max (signed) or max |.| (absolute) over the functions.
SupStatistic sup_statistic(const Eigen::MatrixXd& draws, SupMode mode);
inline SupStatistic sup_statistic(const BootstrapDraws& draws, SupMode mode) {
  return sup_statistic(draws.values, mode);
}

/// inf{z : #{draws > z} / B <= alpha}, attained at an order statistic.
double bootstrap_quantile(const SupStatistic& sup, double alpha);

/// Sup statistics of centered Gaussian vectors with covariance `cov`, sampled
/// through a symmetric eigendecomposition (negative eigenvalues down to
/// -1e-8 trace are treated as zero).
SupStatistic gaussian_oracle_sup(const Eigen::MatrixXd& cov, std::size_t reps, std::uint64_t seed, SupMode mode);

}  // namespace regen
