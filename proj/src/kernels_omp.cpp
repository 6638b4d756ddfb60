// OpenMP versions of the kernels in kernels.hpp. Each output element is
// accumulated in the same order as in kernels_serial.cpp.

#include <omp.h>

#include <cmath>
#include <random>
#include <vector>

#include "regen/error.hpp"
#include "regen/kernels.hpp"
#include "regen/rng.hpp"

namespace regen::kernels::omp {

void kde_grid(std::span<const double> samples, const KernelSpec& kernel, std::span<const double> points,
              std::span<double> out) {
  const double norm = static_cast<double>(samples.size()) * kernel.bandwidth;
  const auto m = static_cast<std::ptrdiff_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < m; ++j) {
    double acc = 0.0;
    for (double x : samples) acc += kernel.base((x - points[j]) / kernel.bandwidth);
    out[j] = acc / norm;
  }
}

void block_sums(std::span<const double> samples, std::span<const Block> blocks, const FunctionTable& table,
                Eigen::MatrixXd& out) {
  out.resize(static_cast<Eigen::Index>(table.size()), static_cast<Eigen::Index>(blocks.size()));
  const auto g = static_cast<std::ptrdiff_t>(table.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < g; ++j) {
    const auto& f = table.functions[static_cast<std::size_t>(j)];
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      double acc = 0.0;
      for (std::size_t t = blocks[i].start; t <= blocks[i].end; ++t) acc += f(samples[t]);
      out(j, static_cast<Eigen::Index>(i)) = acc;
    }
  }
}

void block_covariance(const Eigen::MatrixXd& centered, std::size_t n, Eigen::MatrixXd& out) {
  const Eigen::Index g = centered.rows();
  const Eigen::Index k = centered.cols();
  out.resize(g, g);
  const double inv_n = 1.0 / static_cast<double>(n);
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index j = 0; j < g; ++j) {
    for (Eigen::Index l = j; l < g; ++l) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < k; ++i) acc += centered(j, i) * centered(l, i);
      out(j, l) = acc * inv_n;
    }
  }
  for (Eigen::Index j = 0; j < g; ++j) {
    for (Eigen::Index l = j + 1; l < g; ++l) out(l, j) = out(j, l);
  }
}

void multiplier_draws(const Eigen::MatrixXd& centered, std::size_t n, std::uint64_t seed, std::size_t reps,
                      Eigen::MatrixXd& out) {
  const Eigen::Index g = centered.rows();
  const Eigen::Index k = centered.cols();
  out.resize(static_cast<Eigen::Index>(reps), g);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
#pragma omp parallel
  {
    std::vector<double> acc(static_cast<std::size_t>(g));
#pragma omp for schedule(static)
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(reps); ++r) {
      Rng rng = make_stream(seed, Stream::kMultiplier, static_cast<std::uint64_t>(r));
      std::normal_distribution<double> normal(0.0, 1.0);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (Eigen::Index i = 0; i < k; ++i) {
        const double z = normal(rng);
        const double* col = centered.col(i).data();
        for (Eigen::Index j = 0; j < g; ++j) acc[static_cast<std::size_t>(j)] += z * col[j];
      }
      for (Eigen::Index j = 0; j < g; ++j) out(r, j) = acc[static_cast<std::size_t>(j)] * scale;
    }
  }
}

void pair_kde(std::span<const double> from, std::span<const double> to, double bandwidth, const UniformGrid& axis,
              Eigen::MatrixXd& joint, Eigen::VectorXd& marginal) {
  if (from.size() != to.size()) throw Error(ErrorCode::kDimensionMismatch, "pair_kde needs equally long inputs");
  const auto g = static_cast<Eigen::Index>(axis.size());
  joint.setZero(g, g);
  marginal.setZero(g);
  const double dx = axis.step();
  auto range = [&](double s) {
    const auto lo = static_cast<Eigen::Index>(std::max(0.0, std::ceil((s - bandwidth - axis.lo()) / dx)));
    const auto hi = std::min<Eigen::Index>(g - 1, static_cast<Eigen::Index>(std::floor((s + bandwidth - axis.lo()) / dx)));
    return std::pair{lo, hi};
  };
  // One row per iteration: rows are written by exactly one thread.
#pragma omp parallel for schedule(dynamic)
  for (Eigen::Index i = 0; i < g; ++i) {
    const double xi = axis.at(static_cast<std::size_t>(i));
    for (std::size_t t = 0; t < from.size(); ++t) {
      const auto [xlo, xhi] = range(from[t]);
      if (i < xlo || i > xhi) continue;
      const double kx = reflected_triangular(xi, from[t], bandwidth);
      if (kx == 0.0) continue;
      marginal(i) += kx;
      const auto [ylo, yhi] = range(to[t]);
      for (Eigen::Index j = ylo; j <= yhi; ++j) {
        joint(i, j) += kx * reflected_triangular(axis.at(static_cast<std::size_t>(j)), to[t], bandwidth);
      }
    }
  }
}

}  // namespace regen::kernels::omp
