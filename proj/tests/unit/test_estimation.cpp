#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "regen/error.hpp"
#include "regen/estimation.hpp"
#include "regen/oracle.hpp"
#include "regen/presets.hpp"
#include "regen/stats.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

regen::BlockDecomposition two_state_blocks(std::size_t n, std::uint64_t seed) {
  const auto preset = regen::builtin_preset("two-state");
  return regen::extract_blocks(regen::exact_split(preset.simulate(n, seed), preset.model, seed));
}

}  // namespace

TEST_CASE("kernels are symmetric, integrate to one and scale with h") {
  for (auto type : {regen::KernelType::kTriangular, regen::KernelType::kEpanechnikov}) {
    const regen::KernelSpec k{type, 0.2};
    CHECK_THAT(oracle::integrate([&](double u) { return k.base(u); }, -1.0, 1.0), WithinAbs(1.0, 1e-6));
    for (double u : {0.0, 0.1, 0.5, 0.99, 1.5}) CHECK(k.base(u) == k.base(-u));
    CHECK(k.base(1.0) == 0.0);
    CHECK_THAT(k.scaled(0.5, 0.5), WithinAbs(k.peak() / 0.2, 1e-12));
    CHECK_THAT(oracle::integrate([&](double y) { return k.scaled(0.5, y); }, 0.2, 0.8), WithinAbs(1.0, 1e-6));
  }
  CHECK(regen::parse_kernel("epanechnikov") == regen::KernelType::kEpanechnikov);
  CHECK_THROWS_AS(regen::parse_kernel("gaussian"), regen::Error);
}

TEST_CASE("kernel table envelope dominates and scaling divides") {
  const regen::KernelSpec k{regen::KernelType::kTriangular, 0.1};
  const std::vector<double> xs{0.2, 0.5, 0.8};
  const auto table = regen::FunctionTable::kernel_table(k, xs);
  const auto pts = regen::UniformGrid(0.0, 1.0, 201).nodes();
  CHECK(table.envelope_dominates(pts));
  const std::vector<double> scale{2.0, 4.0, 0.5};
  const auto s = table.scaled(scale);
  CHECK(s.envelope_dominates(pts));
  CHECK_THAT(s.functions[2](0.8), WithinAbs(table.functions[2](0.8) / 0.5, 1e-12));
}

TEST_CASE("block sums and empirical means") {
  const std::vector<double> block{0.2, 0.3};
  CHECK_THAT(regen::block_sum([](double x) { return x; }, block), WithinAbs(0.5, 1e-15));
  CHECK(regen::block_sum([](double) { return 1.0; }, block) == 2.0);
  CHECK_THROWS_AS(regen::block_sum([](double) { return std::nan(""); }, block), regen::Error);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> b(1 + rng() % 20);
    for (auto& v : b) v = u(rng);
    const double a = u(rng);
    const double c = u(rng);
    auto f = [](double x) { return x * x; };
    auto g = [](double x) { return std::sin(x); };
    const double lhs = regen::block_sum([&](double x) { return a * f(x) + c * g(x); }, b);
    CHECK_THAT(lhs, WithinAbs(a * regen::block_sum(f, b) + c * regen::block_sum(g, b), 1e-12));
  }

  const std::vector<double> samples{0.0, 1.0, 2.0, 3.0};
  CHECK(regen::empirical_mean(samples, [](double x) { return x; }) == 1.5);
  CHECK(regen::empirical_mean(samples, [](double) { return 1.0; }) == 1.0);

  const auto preset = regen::builtin_preset("two-state");
  const auto traj = preset.simulate(100000, 12);
  const double m = regen::empirical_mean(traj.samples, [](double x) { return x == 0.0 ? 1.0 : 0.0; });
  // asymptotic variance of the occupation fraction: pi0 pi1 (1 + lambda) / (1 - lambda), lambda = 0.6
  const double se = std::sqrt(0.25 * 0.75 * 1.6 / 0.4 / 100000.0);
  CHECK(std::abs(m - oracle::TwoState{0.3, 0.1}.pi0()) <= 3.0 * se);
}

TEST_CASE("kernel density estimates") {
  const regen::KernelSpec k{regen::KernelType::kTriangular, 0.05};
  const std::vector<double> same(10, 0.4);
  CHECK_THAT(regen::kde(same, k, 0.4), WithinAbs(1.0 / 0.05, 1e-12));
  CHECK(regen::kde(same, k, 0.46) == 0.0);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = u(rng);
  for (double x : {0.2, 0.5, 0.7}) CHECK_THAT(regen::kde(xs, k, x), WithinAbs(1.0, 0.05));

  // quadrature of the KDE over an extended grid
  const auto grid = regen::UniformGrid(-0.1, 1.1, 1201);
  const auto values = regen::kde(xs, k, grid.nodes());
  CHECK_THAT(regen::trapezoid_nodes(values, grid.step()), WithinAbs(1.0, 0.02));
  CHECK(regen::kde(xs, k, 0.5) == values[600]);
}

TEST_CASE("transition density estimate of an iid uniform chain") {
  const auto preset = regen::builtin_preset("iid-uniform");
  const auto traj = preset.simulate(10000, 21);
  const auto p_hat = regen::estimate_transition_density(traj);
  CHECK(p_hat.satisfies_invariants());
  double worst = 0.0;
  for (double v : p_hat.grid().values()) worst = std::max(worst, std::abs(v - 1.0));
  CHECK(worst <= 0.15);
  CHECK_THAT(p_hat.bandwidth(), WithinRel(std::pow(10000.0, -1.0 / 6.0), 1e-12));
  CHECK(p_hat.boundary_correction() == "reflection");
}

TEST_CASE("clipping rule of the transition estimator") {
  const auto preset = regen::builtin_preset("reflected-bm");
  const auto traj = preset.simulate(3000, 4);
  regen::TransitionEstimateOptions opt;
  opt.theta = 0.95;  // above the raw floor somewhere
  opt.cap = 1.05;
  const auto p_hat = regen::estimate_transition_density(traj, opt);
  CHECK(p_hat.satisfies_invariants());
  bool floor_hit = false;
  bool cap_hit = false;
  for (double v : p_hat.grid().values()) {
    CHECK(v >= 0.95);
    CHECK(v <= 1.05);
    floor_hit = floor_hit || v == 0.95;
    cap_hit = cap_hit || v == 1.05;
  }
  CHECK(floor_hit);
  CHECK(cap_hit);

  opt.cap = 0.9;
  CHECK_THROWS_MATCHES(regen::estimate_transition_density(traj, opt), regen::Error,
                       Catch::Matchers::Predicate<regen::Error>(
                           [](const regen::Error& e) { return e.code() == regen::ErrorCode::kInvalidCap; }));
  regen::Trajectory tiny{std::vector<double>(10, 0.5), 0, "t"};
  CHECK_THROWS_AS(regen::estimate_transition_density(tiny), regen::Error);
}

TEST_CASE("degenerate marginal is detected") {
  // all states at 0.02, estimator grid of 3 points and a tiny bandwidth: the node
  // at 0 sees the sample but the KDE there vanishes
  regen::Trajectory traj{std::vector<double>(100, 0.02), 0, "t"};
  regen::TransitionEstimateOptions opt;
  opt.grid_points = 3;
  opt.bandwidth = 0.01;
  CHECK_THROWS_MATCHES(regen::estimate_transition_density(traj, opt), regen::Error,
                       Catch::Matchers::Predicate<regen::Error>(
                           [](const regen::Error& e) { return e.code() == regen::ErrorCode::kDegenerateMarginal; }));
}

TEST_CASE("empirical covariance: basic identities") {
  regen::BlockDecomposition single({1.0, 2.0, 3.0, 4.0}, {{1, 2}}, 1);
  regen::FunctionTable table;
  table.functions = {[](double x) { return x; }, [](double x) { return x * x; }};
  table.locations = {0, 1};
  const auto gamma = regen::empirical_covariance(single, table, regen::Centering::none());
  CHECK_THAT(gamma(0, 0), WithinAbs(25.0 / 4.0, 1e-14));
  CHECK_THAT(gamma(0, 1), WithinAbs(5.0 * 13.0 / 4.0, 1e-14));
  CHECK(gamma(1, 0) == gamma(0, 1));
  const auto centered = regen::empirical_covariance(single, table, regen::Centering::at({2.5, 0.0}));
  CHECK_THAT(centered(0, 0), WithinAbs(0.0, 1e-14));
  CHECK_THROWS_AS(regen::empirical_covariance(regen::BlockDecomposition({1.0}, {}, 1), table, regen::Centering::none()),
                  regen::Error);
  CHECK_THROWS_AS(regen::empirical_covariance(single, table, regen::Centering::at({1.0})), regen::Error);
}

TEST_CASE("empirical covariance is symmetric PSD") {
  const auto d = two_state_blocks(20000, 6);
  regen::FunctionTable table;
  for (int j = 0; j < 8; ++j) {
    table.functions.emplace_back([j](double x) { return std::cos(j * (x + 0.3)); });
    table.locations.push_back(j);
  }
  const auto gamma = regen::empirical_covariance(d, table, regen::Centering::none());
  CHECK((gamma - gamma.transpose()).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gamma);
  CHECK(eig.eigenvalues().minCoeff() >= -1e-10 * gamma.trace());
}

TEST_CASE("two-state covariance against an independent-block oracle") {
  const auto preset = regen::builtin_preset("two-state");
  const double pi0 = oracle::TwoState{0.3, 0.1}.pi0();
  regen::FunctionTable table;
  table.functions = {[](double x) { return x == 0.0 ? 1.0 : 0.0; }};
  table.locations = {0};
  const auto blocks = regen::simulate_independent_blocks(preset.model, 1000000, 99);
  const auto moments = regen::block_moments(blocks, table, std::vector<double>{pi0});
  const double beta = oracle::two_state_block_length({0.3, 0.1}, 0.6);
  CHECK_THAT(moments.mean_length, WithinRel(beta, 0.01));
  CHECK_THAT(moments.mean_sum(0), WithinRel(beta * pi0, 0.01));

  const auto d = two_state_blocks(100000, 17);
  const auto gamma = regen::empirical_covariance(d, table, regen::Centering::at({pi0}));
  CHECK_THAT(gamma(0, 0), WithinRel(moments.second_moment(0, 0) / beta, 0.1));

  CHECK(regen::delta_diagnostic(d, table, moments.second_moment, beta, regen::Centering::at({pi0})) < 0.1);
  CHECK_THROWS_AS(regen::delta_diagnostic(d, table, Eigen::MatrixXd::Zero(2, 2), beta, regen::Centering::none()),
                  regen::Error);
}

TEST_CASE("Delta diagnostic vanishes on identical inputs and for the zero table") {
  const auto d = two_state_blocks(5000, 2);
  regen::FunctionTable table;
  table.functions = {[](double x) { return x; }, [](double x) { return 1.0 - x; }};
  table.locations = {0, 1};
  const auto gamma = regen::empirical_covariance(d, table, regen::Centering::none());
  const double beta = 3.0;
  CHECK(regen::delta_diagnostic(d, table, gamma * beta, beta, regen::Centering::none()) < 1e-15);

  regen::FunctionTable zero;
  zero.functions = {[](double) { return 0.0; }};
  zero.locations = {0};
  CHECK(regen::delta_diagnostic(d, zero, Eigen::MatrixXd::Zero(1, 1), 2.0, regen::Centering::none()) == 0.0);
}
