#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "regen/error.hpp"
#include "regen/estimation.hpp"
#include "regen/presets.hpp"
#include "regen/splitting.hpp"
#include "regen/stats.hpp"

using Catch::Matchers::WithinAbs;

namespace {

std::vector<double> iota_samples(std::size_t n) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i);
  return x;
}


}  // namespace

TEST_CASE("hand-traced decomposition of flags 1,0,0,1,0") {
  const auto split = regen::SplitTrajectory::from_flags(iota_samples(5), {1, 0, 0, 1, 0});
  const auto d = regen::extract_blocks(split);
  REQUIRE(d.block_count() == 1);
  CHECK(d.head().size() == 1);
  CHECK(d.head()[0] == 0.0);
  CHECK(d.blocks()[0].start == 1);
  CHECK(d.blocks()[0].end == 3);
  CHECK(d.blocks()[0].length() == 3);
  REQUIRE(d.tail().size() == 1);
  CHECK(d.tail()[0] == 4.0);
  CHECK(d.beta_hat().value() == 5.0);
}

TEST_CASE("all flags one and all flags zero") {
  const std::size_t n = 9;
  const auto ones = regen::extract_blocks(regen::SplitTrajectory::from_flags(iota_samples(n), std::vector<std::uint8_t>(n, 1)));
  CHECK(ones.block_count() == n - 1);
  for (const auto& b : ones.blocks()) CHECK(b.length() == 1);
  CHECK(ones.blocks()[2].start == 3);
  CHECK(ones.beta_hat().value() == static_cast<double>(n) / static_cast<double>(n - 1));
  CHECK(ones.tail().empty());

  const auto zeros = regen::extract_blocks(regen::SplitTrajectory::from_flags(iota_samples(n), std::vector<std::uint8_t>(n, 0)));
  CHECK(zeros.empty());
  CHECK(zeros.head().size() == n);
  CHECK(zeros.tail().empty());
  CHECK_FALSE(zeros.beta_hat().has_value());
}

TEST_CASE("decomposition reassembles the trajectory for random flag patterns") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 1 + rng() % 200;
    const std::size_t flag_count = rng() % 2 == 0 ? n : n - 1;
    const double rate = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    std::bernoulli_distribution flag(rate);
    std::vector<std::uint8_t> flags(flag_count);
    for (auto& f : flags) f = flag(rng) ? 1 : 0;
    const auto samples = iota_samples(n);
    const auto d = regen::extract_blocks(regen::SplitTrajectory::from_flags(samples, flags));

    std::vector<double> joined(d.head().begin(), d.head().end());
    std::size_t total = d.head().size() + d.tail().size();
    for (const auto& b : d.blocks()) {
      const auto v = d.values(b);
      REQUIRE(b.length() >= 1);
      REQUIRE(v.front() == static_cast<double>(b.start));
      REQUIRE(flags[b.end] == 1);
      joined.insert(joined.end(), v.begin(), v.end());
      total += b.length();
    }
    joined.insert(joined.end(), d.tail().begin(), d.tail().end());
    REQUIRE(total == n);
    REQUIRE(joined == samples);

    std::size_t ones = 0;
    for (auto f : flags) ones += f;
    REQUIRE(d.block_count() == (ones == 0 ? 0 : ones - 1));
  }
}

TEST_CASE("exact split of an iid chain flags every step") {
  const auto preset = regen::builtin_preset("two-state-iid");
  const auto traj = preset.simulate(500, 1);
  const auto split = regen::exact_split(traj, preset.model, 1);
  REQUIRE(split.flags.size() == 499);
  for (auto f : split.flags) CHECK(f == 1);
  const auto d = regen::extract_blocks(split);
  CHECK(d.block_count() == 498);
  for (const auto& b : d.blocks()) CHECK(b.length() == 1);
  const auto report = regen::regeneration_diagnostics(d);
  CHECK(report.lag1_length_correlation == 0.0);
}

TEST_CASE("outside S with theta = 1 the flag is always one") {
  Eigen::MatrixXd P(2, 2);
  P << 0.5, 0.5, 0.5, 0.5;
  const auto model = regen::MarkovModel::finite(P, regen::SmallSet::states({0}), 1.0, {0.5, 0.5});
  const auto traj = regen::simulate_chain(model, 400, 1.0, 4);
  const auto split = regen::exact_split(traj, model, 4);
  for (std::size_t t = 0; t < split.flags.size(); ++t) {
    if (traj.samples[t] == 1.0) CHECK(split.flags[t] == 1);
  }
}

TEST_CASE("two-state chain: regeneration rate, block length and block means against first-step analysis") {
  const auto preset = regen::builtin_preset("two-state");
  const oracle::TwoState oc{0.3, 0.1};
  const double theta = 0.6;
  const std::size_t n = 200000;
  const auto traj = preset.simulate(n, 77);
  const auto split = regen::exact_split(traj, preset.model, 77);
  double regen_count = 0.0;
  for (std::size_t t = 0; t < split.flags.size(); ++t) regen_count += split.regenerates(t) ? 1.0 : 0.0;
  const double rate = regen_count / static_cast<double>(split.flags.size());
  CHECK_THAT(rate, WithinAbs(oracle::two_state_regeneration_rate(oc, theta), 0.005));
  // flags outside S are Bern(theta), inside S the success probability averages to theta as well
  CHECK_THAT(split.flag_rate(), WithinAbs(theta, 0.005));

  const auto d = regen::extract_blocks(split);
  const double beta = oracle::two_state_block_length(oc, theta);
  std::vector<double> lengths;
  std::vector<double> ident;
  for (const auto& b : d.blocks()) {
    lengths.push_back(static_cast<double>(b.length()));
    ident.push_back(regen::block_sum([](double x) { return x; }, d.values(b)));
    CHECK(regen::block_sum([](double) { return 1.0; }, d.values(b)) == static_cast<double>(b.length()));
  }
  const auto ls = regen::summarize(lengths);
  CHECK(std::abs(ls.mean - beta) <= 3.0 * ls.standard_error);
  const auto is = regen::summarize(ident);
  CHECK(std::abs(is.mean - beta * oc.pi1()) <= 3.0 * is.standard_error);
  for (const auto& b : d.blocks()) REQUIRE(d.values(b).front() == 0.0);  // nu = delta_0
  const auto report = regen::regeneration_diagnostics(d, {{}, beta, 30});
  CHECK(std::abs(report.mean_block_length - beta) <= 3.0 * report.block_length_se);
  CHECK(std::abs(report.lag1_length_correlation) < 0.02);
  CHECK(report.count_deviation.value() < 10.0);
}

TEST_CASE("block count concentrates around n / beta") {
  const auto preset = regen::builtin_preset("two-state");
  const double beta = oracle::two_state_block_length({0.3, 0.1}, 0.6);
  const std::size_t n = 10000;
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto d = regen::extract_blocks(regen::exact_split(preset.simulate(n, s), preset.model, s));
    worst = std::max(worst, std::abs(static_cast<double>(d.block_count()) - static_cast<double>(n) / beta));
  }
  CHECK(worst <= 10.0 * std::sqrt(static_cast<double>(n)));
}

TEST_CASE("approximate split with p_hat = p reproduces the exact flags bit for bit") {
  const auto preset = regen::builtin_preset("reflected-bm");
  const auto traj = preset.simulate(5000, 8);
  const auto exact = regen::exact_split(traj, preset.model, 8);
  const auto approx = regen::approximate_split(traj, regen::TransitionDensityEstimate::from_model(preset.model), 8);
  CHECK(exact.flags == approx.flags);
  CHECK(approx.mode == regen::SplitMode::kApproximate);
  const auto other = regen::exact_split(traj, preset.model, 9);
  CHECK(other.flags != exact.flags);
}

TEST_CASE("split errors") {
  Eigen::MatrixXd P(2, 2);
  P << 1.0, 0.0, 0.5, 0.5;
  const auto model = regen::MarkovModel::finite(P, regen::SmallSet::states({0, 1}), 0.5, {1.0, 0.0});
  regen::Trajectory impossible{{0.0, 1.0}, 0, "t"};
  CHECK_THROWS_MATCHES(regen::exact_split(impossible, model, 1), regen::Error,
                       Catch::Matchers::Predicate<regen::Error>(
                           [](const regen::Error& e) { return e.code() == regen::ErrorCode::kImpossibleTransition; }));
  const auto bad = regen::MarkovModel::finite(P, regen::SmallSet::states({0, 1}), 0.9, {1.0, 0.0});
  regen::Trajectory excess{{1.0, 0.0}, 0, "t"};
  CHECK_THROWS_MATCHES(regen::exact_split(excess, bad, 1), regen::Error,
                       Catch::Matchers::Predicate<regen::Error>(
                           [](const regen::Error& e) { return e.code() == regen::ErrorCode::kMinorizationViolation; }));
}

TEST_CASE("regeneration diagnostics on a diffusion: first components follow nu") {
  const auto preset = regen::builtin_preset("reflected-bm");
  const auto d = regen::extract_blocks(regen::exact_split(preset.simulate(20000, 5), preset.model, 5));
  regen::RegenerationOptions opt;
  opt.nu_cdf = [](double x) { return std::clamp(x, 0.0, 1.0); };
  const auto report = regen::regeneration_diagnostics(d, opt);
  REQUIRE(report.available);
  CHECK(report.ks_pvalue.value() > 0.001);
  std::size_t hist_total = 0;
  for (const auto& [len, count] : report.length_histogram) hist_total += count;
  CHECK(hist_total == d.block_count());

  const auto few = regen::extract_blocks(regen::SplitTrajectory::from_flags(iota_samples(10), {1, 0, 1, 1}));
  CHECK_FALSE(regen::regeneration_diagnostics(few, opt).available);
}
