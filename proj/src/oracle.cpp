#include "regen/oracle.hpp"

#include <random>

#include "regen/error.hpp"
#include "regen/rng.hpp"

namespace regen {

IndependentBlocks simulate_independent_blocks(const MarkovModel& model, std::size_t count, std::uint64_t seed) {
  IndependentBlocks out;
  out.offsets.reserve(count + 1);
  out.offsets.push_back(0);
  Rng rng = make_stream(seed, Stream::kIndependentBlocks);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t b = 0; b < count; ++b) {
    double x = model.sample_nu(rng);
    for (;;) {
      out.values.push_back(x);
      if (model.in_small_set(x)) {
        if (unif(rng) < model.theta()) break;
        x = model.sample_residual(x, rng);
      } else {
        x = model.sample_next(x, rng);
      }
    }
    out.offsets.push_back(out.values.size());
  }
  return out;
}

BlockMoments block_moments(const IndependentBlocks& blocks, const FunctionTable& table, std::span<const double> centers) {
  const auto g = static_cast<Eigen::Index>(table.size());
  if (static_cast<Eigen::Index>(centers.size()) != g) {
    throw Error(ErrorCode::kDimensionMismatch, "one center per table function required");
  }
  if (blocks.count() == 0) throw Error(ErrorCode::kNoBlocks, "block moments need blocks");
  BlockMoments m;
  m.second_moment = Eigen::MatrixXd::Zero(g, g);
  m.mean_sum = Eigen::VectorXd::Zero(g);
  Eigen::VectorXd sums(g);
  double total_length = 0.0;
  for (std::size_t i = 0; i < blocks.count(); ++i) {
    const auto values = blocks.block(i);
    const auto len = static_cast<double>(values.size());
    for (Eigen::Index j = 0; j < g; ++j) {
      double s = 0.0;
      for (double v : values) s += table.functions[static_cast<std::size_t>(j)](v);
      sums(j) = s;
    }
    m.mean_sum += sums;
    for (Eigen::Index j = 0; j < g; ++j) sums(j) -= len * centers[static_cast<std::size_t>(j)];
    m.second_moment.noalias() += sums * sums.transpose();
    total_length += len;
  }
  const auto k = static_cast<double>(blocks.count());
  m.second_moment /= k;
  m.mean_sum /= k;
  m.mean_length = total_length / k;
  return m;
}

Eigen::VectorXd finite_stationary(const Eigen::MatrixXd& transition) {
  const Eigen::Index k = transition.rows();
  // (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
  Eigen::MatrixXd a = transition.transpose() - Eigen::MatrixXd::Identity(k, k);
  a.row(k - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  rhs(k - 1) = 1.0;
  return a.fullPivLu().solve(rhs);
}

double finite_beta(const MarkovModel& model) {
  const Eigen::VectorXd pi = finite_stationary(model.matrix());
  double mass = 0.0;
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    if (model.in_small_set(static_cast<double>(i))) mass += pi(i);
  }
  return 1.0 / (model.theta() * mass);
}

}  // namespace regen
