#include "regen/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "regen/error.hpp"
#include "regen/kernels.hpp"
#include "regen/rng.hpp"

namespace regen {

BootstrapDraws wild_bootstrap_draws(const Eigen::MatrixXd& centered, std::size_t n, std::size_t reps,
                                    std::uint64_t seed) {
  if (centered.cols() == 0) throw Error(ErrorCode::kNoBlocks, "bootstrap needs at least one block");
  if (reps == 0) throw Error(ErrorCode::kInvalidArgument, "bootstrap needs at least one replication");
  BootstrapDraws out;
  out.seed = seed;
  kernels::omp::multiplier_draws(centered, n, seed, reps, out.values);
  if (!out.values.allFinite()) throw Error(ErrorCode::kNumeric, "bootstrap draws are not finite");
  return out;
}

BootstrapDraws wild_bootstrap_draws(const BlockDecomposition& decomp, const FunctionTable& table,
                                    const std::vector<double>& pi_hat, std::size_t reps, std::uint64_t seed) {
  if (decomp.empty()) throw Error(ErrorCode::kNoBlocks, "bootstrap needs at least one block");
  const auto sums = block_sums(decomp, table);
  auto out = wild_bootstrap_draws(centered_block_sums(sums, Centering::at(pi_hat)), decomp.sample_count(), reps, seed);
  out.centering = pi_hat;
  return out;
}

SupStatistic sup_statistic(const Eigen::MatrixXd& draws, SupMode mode) {
  if (draws.cols() == 0) throw Error(ErrorCode::kInvalidArgument, "sup statistic needs at least one function");
  SupStatistic sup;
  sup.mode = mode;
  sup.values.resize(static_cast<std::size_t>(draws.rows()));
  for (Eigen::Index r = 0; r < draws.rows(); ++r) {
    sup.values[static_cast<std::size_t>(r)] =
        mode == SupMode::kSigned ? draws.row(r).maxCoeff() : draws.row(r).cwiseAbs().maxCoeff();
  }
  return sup;
}

double bootstrap_quantile(const SupStatistic& sup, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must lie in (0, 1)");
  const std::size_t reps = sup.values.size();
  if (static_cast<double>(reps) * alpha < 1.0) {
    std::ostringstream msg;
    msg << reps << " replications cannot resolve alpha = " << alpha;
    throw Error(ErrorCode::kInsufficientReps, msg.str());
  }
  std::vector<double> sorted = sup.values;
  std::sort(sorted.begin(), sorted.end());
  // #{draws > sorted[k]} is reps - (last index holding sorted[k]) - 1; scan
  // upward for the first order statistic meeting the bound.
  const double b = static_cast<double>(reps);
  for (std::size_t k = 0; k < reps; ++k) {
    const auto above = static_cast<double>(sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), sorted[k]));
    if (above / b <= alpha) return sorted[k];
  }
  return sorted.back();
}

SupStatistic gaussian_oracle_sup(const Eigen::MatrixXd& cov, std::size_t reps, std::uint64_t seed, SupMode mode) {
  const Eigen::Index g = cov.rows();
  if (g == 0 || cov.cols() != g) throw Error(ErrorCode::kInvalidCovariance, "covariance must be square and nonempty");
  const double scale = std::max(cov.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw Error(ErrorCode::kInvalidCovariance, "covariance is not symmetric");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (cov + cov.transpose()));
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::kInvalidCovariance, "eigendecomposition failed");
  Eigen::VectorXd lambda = eig.eigenvalues();
  const double floor = -1e-8 * std::abs(cov.trace());
  if (lambda.minCoeff() < floor) {
    std::ostringstream msg;
    msg << "covariance has eigenvalue " << lambda.minCoeff() << " below " << floor;
    throw Error(ErrorCode::kInvalidCovariance, msg.str());
  }
  lambda = lambda.cwiseMax(0.0);
  const Eigen::MatrixXd root = eig.eigenvectors() * lambda.cwiseSqrt().asDiagonal();

  Eigen::MatrixXd draws(static_cast<Eigen::Index>(reps), g);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(reps); ++r) {
    Rng rng = make_stream(seed, Stream::kGaussianOracle, static_cast<std::uint64_t>(r));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd z(g);
    for (Eigen::Index j = 0; j < g; ++j) z(j) = normal(rng);
    draws.row(r) = (root * z).transpose();
  }
  return sup_statistic(draws, mode);
}

}  // namespace regen
