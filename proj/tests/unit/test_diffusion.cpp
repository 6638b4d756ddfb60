#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "regen/diffusion.hpp"
#include "regen/error.hpp"
#include "regen/presets.hpp"
#include "regen/stats.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("built-in coefficients satisfy the regularity class") {
  for (const auto& [b, rho] : {std::pair{"zero", "one"}, {"zero", "bump"}, {"sine", "one"}, {"sine", "bump"}}) {
    const auto params = regen::make_diffusion(b, rho);
    const auto check = regen::check_diffusion(params);
    CAPTURE(b, rho);
    CHECK(check.ok());
    CHECK(check.min_dispersion_squared >= 1.0);
  }
  CHECK_THROWS_AS(regen::drift_preset("cubic"), regen::Error);
}

TEST_CASE("class violations are named") {
  auto params = regen::make_diffusion("zero", "one");
  params.drift = [](double x) { return 1.0 - x; };
  CHECK_FALSE(regen::check_diffusion(params).ok());
  params = regen::make_diffusion("zero", "one");
  params.dispersion = [](double x) { return 1.0 + x; };
  CHECK_FALSE(regen::check_diffusion(params).ok());
  params = regen::make_diffusion("zero", "one");
  params.dispersion = [](double) { return 0.1; };
  CHECK_FALSE(regen::check_diffusion(params).ok());
  CHECK_THROWS_AS(regen::diffusion_transition_model(params), regen::Error);
}

TEST_CASE("mirror folding into the unit interval") {
  CHECK(regen::reflect_unit(0.3) == 0.3);
  CHECK_THAT(regen::reflect_unit(-0.2), WithinAbs(0.2, 1e-15));
  CHECK_THAT(regen::reflect_unit(1.25), WithinAbs(0.75, 1e-15));
  CHECK_THAT(regen::reflect_unit(2.3), WithinAbs(0.3, 1e-14));
  CHECK_THAT(regen::reflect_unit(-1.6), WithinAbs(0.4, 1e-14));
}

TEST_CASE("stationary density against nested adaptive quadrature") {
  const std::vector<double> xs{0.0, 0.1, 0.37, 0.5, 0.81, 1.0};
  for (const auto& [b, rho] : {std::pair{"zero", "one"}, {"zero", "bump"}, {"sine", "one"}, {"sine", "bump"}}) {
    const auto params = regen::make_diffusion(b, rho);
    const auto got = regen::stationary_density(params.drift, params.dispersion, xs).values;
    const auto want = oracle::stationary_density(params.drift, params.dispersion, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CAPTURE(b, rho, xs[i]);
      CHECK_THAT(got[i], WithinRel(want[i], 1e-9));
    }
  }
  const auto flat = regen::stationary_density(regen::drift_preset("zero"), regen::dispersion_preset("one"),
                                              std::vector<double>{0.2, 0.9});
  CHECK_THAT(flat.values[0], WithinAbs(1.0, 1e-14));
  CHECK_THAT(flat.normalizer, WithinAbs(1.0, 1e-14));
}

TEST_CASE("stationary density respects the class bounds") {
  const auto params = regen::make_diffusion("sine", "bump");
  const auto [lo, hi] = regen::stationary_bounds(params.sup_bound, params.dispersion_floor);
  const auto grid = regen::UniformGrid(0.0, 1.0, 101).nodes();
  for (double v : regen::stationary_density(params.drift, params.dispersion, grid).values) {
    CHECK(v >= lo);
    CHECK(v <= hi);
  }
}

TEST_CASE("reflected Brownian transition density: cosine series equals method of images") {
  for (double t : {0.05, 0.5, 2.0}) {
    for (double x : {0.0, 0.3, 1.0}) {
      for (double y : {0.1, 0.5, 0.95}) {
        CHECK_THAT(regen::reflected_brownian_density(x, y, t), WithinAbs(oracle::reflected_bm_images(x, y, t), 1e-10));
      }
    }
  }
}

TEST_CASE("generator transition model of reflected Brownian motion") {
  const auto model = regen::diffusion_transition_model(regen::make_diffusion("zero", "one"), 201);
  CHECK(regen::check_model(model).ok(1e-12));
  double worst = 0.0;
  for (double x : {0.0, 0.25, 0.5, 0.9}) {
    for (double y : {0.0, 0.1, 0.5, 0.75, 1.0}) {
      worst = std::max(worst, std::abs(model.transition_density(x, y) - oracle::reflected_bm_images(x, y, 0.5)));
    }
  }
  CHECK(worst < 1e-4);
  CHECK(model.theta() > 0.8);
  CHECK(model.small_set().contains(0.0));
  CHECK(model.small_set().contains(1.0));
}

TEST_CASE("generator transition model leaves the stationary density invariant") {
  const auto params = regen::make_diffusion("sine", "bump");
  const auto model = regen::diffusion_transition_model(params, 201);
  const auto& p = model.density();
  const auto nodes = p.axis().nodes();
  const auto pi = regen::stationary_density(params.drift, params.dispersion, nodes).values;
  // (pi P)(y) = int pi(x) p(x, y) dx by the trapezoid rule on the nodes
  double worst = 0.0;
  for (std::size_t j = 0; j < nodes.size(); j += 20) {
    std::vector<double> col(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) col[i] = pi[i] * p.at(i, j);
    worst = std::max(worst, std::abs(regen::trapezoid_nodes(col, p.axis().step()) - pi[j]));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("Euler scheme stays in [0,1], is seeded, and samples the stationary law") {
  const auto params = regen::make_diffusion("sine", "one");
  const auto a = regen::simulate_reflected_diffusion(params, 20000, 0.5, 3);
  const auto b = regen::simulate_reflected_diffusion(params, 20000, 0.5, 3);
  CHECK(a.samples == b.samples);
  for (double x : a.samples) REQUIRE((x >= 0.0 && x <= 1.0));
  const auto pi = [&](double x) {
    return regen::stationary_density(params.drift, params.dispersion, std::vector<double>{x}).values[0];
  };
  CHECK(regen::histogram_tv(a.samples, pi, 10) < 0.03);
  CHECK_THROWS_AS(regen::simulate_reflected_diffusion(params, 10, 1.5, 3), regen::Error);
  CHECK_THROWS_AS(regen::simulate_reflected_diffusion(params, 0, 0.5, 3), regen::Error);
}

TEST_CASE("Euler transitions of reflected Brownian motion match the exact kernel") {
  // X_0 = 0.3 repeatedly: the law of X_1 has density p(0.3, .)
  const auto params = regen::make_diffusion("zero", "one");
  std::vector<double> ends;
  for (std::uint64_t s = 0; s < 4000; ++s) ends.push_back(regen::simulate_reflected_diffusion(params, 2, 0.3, s).samples[1]);
  auto cdf = [](double y) {
    return oracle::integrate([](double u) { return oracle::reflected_bm_images(0.3, u, 0.5); }, 0.0, y);
  };
  CHECK(oracle::ks_distance(ends, cdf) < 1.63 / std::sqrt(4000.0));
}
