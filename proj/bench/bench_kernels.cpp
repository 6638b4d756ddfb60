// Serial reference vs OpenMP kernels on a reflected Brownian motion trajectory.
#include <benchmark/benchmark.h>

#include "regen/band.hpp"
#include "regen/diffusion.hpp"
#include "regen/estimation.hpp"
#include "regen/kernels.hpp"
#include "regen/presets.hpp"
#include "regen/splitting.hpp"

namespace {

struct Fixture {
  regen::Trajectory traj;
  regen::BlockDecomposition decomp;
  regen::KernelSpec kernel;
  std::vector<double> grid;
  regen::FunctionTable table;
  Eigen::MatrixXd centered;

  explicit Fixture(std::size_t n) {
    const auto preset = regen::builtin_preset("reflected-bm");
    traj = preset.simulate(n, 11);
    decomp = regen::extract_blocks(regen::exact_split(traj, preset.model, 11));
    kernel = regen::KernelSpec{regen::KernelType::kTriangular, std::pow(static_cast<double>(n), -0.22)};
    grid = regen::band_grid(kernel.bandwidth * 1.001, 1.0 - kernel.bandwidth * 1.001, kernel.bandwidth / 5.0);
    table = regen::FunctionTable::kernel_table(kernel, grid);
    const auto pi_hat = regen::kde(decomp.samples(), kernel, grid);
    centered = regen::centered_block_sums(regen::block_sums(decomp, table), regen::Centering::at(pi_hat));
  }
};

const Fixture& fixture(std::size_t n) {
  static const Fixture small(5000);
  static const Fixture large(50000);
  return n <= 5000 ? small : large;
}

template <bool Parallel>
void BM_KdeGrid(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  std::vector<double> out(f.grid.size());
  for (auto _ : state) {
    if constexpr (Parallel) {
      regen::kernels::omp::kde_grid(f.traj.samples, f.kernel, f.grid, out);
    } else {
      regen::kernels::serial::kde_grid(f.traj.samples, f.kernel, f.grid, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_BlockSums(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  Eigen::MatrixXd out;
  for (auto _ : state) {
    if constexpr (Parallel) {
      regen::kernels::omp::block_sums(f.decomp.samples(), f.decomp.blocks(), f.table, out);
    } else {
      regen::kernels::serial::block_sums(f.decomp.samples(), f.decomp.blocks(), f.table, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_BlockCovariance(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  Eigen::MatrixXd out;
  for (auto _ : state) {
    if constexpr (Parallel) {
      regen::kernels::omp::block_covariance(f.centered, f.traj.size(), out);
    } else {
      regen::kernels::serial::block_covariance(f.centered, f.traj.size(), out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_MultiplierDraws(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  Eigen::MatrixXd out;
  for (auto _ : state) {
    if constexpr (Parallel) {
      regen::kernels::omp::multiplier_draws(f.centered, f.traj.size(), 3, 1000, out);
    } else {
      regen::kernels::serial::multiplier_draws(f.centered, f.traj.size(), 3, 1000, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
}

template <bool Parallel>
void BM_PairKde(benchmark::State& state) {
  const auto& f = fixture(static_cast<std::size_t>(state.range(0)));
  const std::span<const double> x(f.traj.samples);
  const auto from = x.first(x.size() - 1);
  const auto to = x.subspan(1);
  const regen::UniformGrid axis(0.0, 1.0, 65);
  const double h = std::pow(static_cast<double>(x.size()), -1.0 / 6.0);
  Eigen::MatrixXd joint;
  Eigen::VectorXd marginal;
  for (auto _ : state) {
    if constexpr (Parallel) {
      regen::kernels::omp::pair_kde(from, to, h, axis, joint, marginal);
    } else {
      regen::kernels::serial::pair_kde(from, to, h, axis, joint, marginal);
    }
    benchmark::DoNotOptimize(joint.data());
  }
}

}  // namespace

BENCHMARK_TEMPLATE(BM_KdeGrid, false)->Arg(5000)->Arg(50000);
BENCHMARK_TEMPLATE(BM_KdeGrid, true)->Arg(5000)->Arg(50000);
BENCHMARK_TEMPLATE(BM_BlockSums, false)->Arg(5000)->Arg(50000);
BENCHMARK_TEMPLATE(BM_BlockSums, true)->Arg(5000)->Arg(50000);
BENCHMARK_TEMPLATE(BM_BlockCovariance, false)->Arg(5000)->Arg(50000);
BENCHMARK_TEMPLATE(BM_BlockCovariance, true)->Arg(5000)->Arg(50000);
BENCHMARK_TEMPLATE(BM_MultiplierDraws, false)->Arg(5000)->Arg(50000);
BENCHMARK_TEMPLATE(BM_MultiplierDraws, true)->Arg(5000)->Arg(50000);
BENCHMARK_TEMPLATE(BM_PairKde, false)->Arg(5000)->Arg(50000);
BENCHMARK_TEMPLATE(BM_PairKde, true)->Arg(5000)->Arg(50000);

BENCHMARK_MAIN();
