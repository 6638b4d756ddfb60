#pragma once

// Data-parallel inner loops. Every kernel exists twice with one signature: a
// plain serial reference and an OpenMP version. Both evaluate each output
// element with the same sequence of floating-point operations, so their results
// agree bit for bit; tests rely on that and bench/ compares their speed.

#include <cstddef>
#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "regen/estimation.hpp"
#include "regen/grid.hpp"
#include "regen/splitting.hpp"

namespace regen::kernels {

namespace serial {
// out[j] = (n h)^{-1} sum_i w((X_i - x_j) / h)
void kde_grid(std::span<const double> samples, const KernelSpec& kernel, std::span<const double> points,
              std::span<double> out);
// out(j, i) = sum over block i of f_j
void block_sums(std::span<const double> samples, std::span<const Block> blocks, const FunctionTable& table,
                Eigen::MatrixXd& out);
// out(j, l) = n^{-1} sum_i c(j, i) c(l, i)
void block_covariance(const Eigen::MatrixXd& centered, std::size_t n, Eigen::MatrixXd& out);
// out(r, j) = n^{-1/2} sum_i zeta_{r,i} c(j, i), zeta_r drawn from multiplier substream r
void multiplier_draws(const Eigen::MatrixXd& centered, std::size_t n, std::uint64_t seed, std::size_t reps,
                      Eigen::MatrixXd& out);
// Reflected product-kernel sums over pairs (from[t], to[t]) on the axis nodes:
// joint(i, j) = sum_t K(x_i, from_t) K(y_j, to_t), marginal[i] = sum_t K(x_i, from_t)
void pair_kde(std::span<const double> from, std::span<const double> to, double bandwidth, const UniformGrid& axis,
              Eigen::MatrixXd& joint, Eigen::VectorXd& marginal);
}  // namespace serial

namespace omp {
// out[j] = (n h)^{-1} sum_i w((X_i - x_j) / h)
void kde_grid(std::span<const double> samples, const KernelSpec& kernel, std::span<const double> points,
              std::span<double> out);
// out(j, i) = sum over block i of f_j
void block_sums(std::span<const double> samples, std::span<const Block> blocks, const FunctionTable& table,
                Eigen::MatrixXd& out);
// out(j, l) = n^{-1} sum_i c(j, i) c(l, i)
void block_covariance(const Eigen::MatrixXd& centered, std::size_t n, Eigen::MatrixXd& out);
// out(r, j) = n^{-1/2} sum_i zeta_{r,i} c(j, i), zeta_r drawn from multiplier substream r
void multiplier_draws(const Eigen::MatrixXd& centered, std::size_t n, std::uint64_t seed, std::size_t reps,
                      Eigen::MatrixXd& out);
// Reflected product-kernel sums over pairs (from[t], to[t]) on the axis nodes:
// joint(i, j) = sum_t K(x_i, from_t) K(y_j, to_t), marginal[i] = sum_t K(x_i, from_t)
void pair_kde(std::span<const double> from, std::span<const double> to, double bandwidth, const UniformGrid& axis,
              Eigen::MatrixXd& joint, Eigen::VectorXd& marginal);
}  // namespace omp

/// Triangular kernel at distance d with bandwidth h, plus its mirror images in
/// 0 and 1 (boundary reflection on [0, 1]).
inline double reflected_triangular(double x, double sample, double h) noexcept {
  auto tri = [h](double d) {
    const double a = (d < 0 ? -d : d) / h;
    return a >= 1.0 ? 0.0 : (1.0 - a) / h;
  };
  return tri(x - sample) + tri(x + sample) + tri(x - (2.0 - sample));
}

}  // namespace regen::kernels
