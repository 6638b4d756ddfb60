#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "regen/chain.hpp"
#include "regen/grid.hpp"

namespace regen {

/// Reflected diffusion dX = b(X) dt + rho(X) dW + q(X) dL on [0, 1], sampled
/// every `delta` time units.
struct DiffusionParams {
  ScalarFn drift;
  ScalarFn dispersion;
  double delta = 0.5;
  int substeps = 100;
  double sup_bound = 10.0;          // cap on |b|, |b'|, |rho|, |rho'|, |rho''|
  double dispersion_floor = 0.25;   // lower bound on rho^2
  std::string tag = "diffusion";
};

/// Built-in coefficient presets.
///   drift:      "zero" (b = 0), "sine" (b = 0.5 sin(2 pi x))
///   dispersion: "one" (rho = 1), "bump" (rho = 1 + x^2 (1 - x)^2)
ScalarFn drift_preset(const std::string& kind);
ScalarFn dispersion_preset(const std::string& kind);
DiffusionParams make_diffusion(const std::string& drift_kind, const std::string& dispersion_kind,
                               double delta = 0.5, int substeps = 100);

struct DiffusionCheck {
  double drift_at_endpoints = 0.0;        // max(|b(0)|, |b(1)|)
  double dispersion_slope_at_endpoints = 0.0;  // max(|rho'(0)|, |rho'(1)|), one-sided differences
  double sup_norm = 0.0;                  // max of the five sup norms
  double min_dispersion_squared = 0.0;
  std::vector<std::string> violations;
  [[nodiscard]] bool ok() const noexcept { return violations.empty(); }
};

/// Check the regularity class on `points` equally spaced nodes of [0, 1].
DiffusionCheck check_diffusion(const DiffusionParams& params, std::size_t points = 1025);

/// Euler-Maruyama with `substeps` steps per observation interval; after every
/// step the state is mirror-folded back into [0, 1].
Trajectory simulate_reflected_diffusion(const DiffusionParams& params, std::size_t n, double x0,
                                        std::uint64_t seed);

/// Fold x into [0, 1]: x -> -x below 0, x -> 2 - x above 1, repeated.
double reflect_unit(double x) noexcept;

struct StationaryDensity {
  std::vector<double> values;
  double normalizer = 1.0;  // C0
};

/// pi(x) = exp(int_0^x 2 b / rho^2) / (C0 rho^2(x)) evaluated at `points`, with C0
/// fixed by composite Simpson so that pi integrates to one over [0, 1].
StationaryDensity stationary_density(const ScalarFn& drift, const ScalarFn& dispersion,
                                     std::span<const double> points, std::size_t intervals = 1024);

/// Bounds 0 < pi_l <= pi <= pi_u implied by the class constants alone.
std::pair<double, double> stationary_bounds(double sup_bound, double dispersion_floor);

/// Transition density of the low-frequency chain as a grid model with S = [0,1],
/// uniform nu and theta = grid minimum of p (unless given).
///
/// The density is exp(delta Q) of a conservative finite-volume discretization Q
/// of the generator b f' + rho^2 f'' / 2 with reflecting (Neumann) boundaries.
/// Q is reversible with respect to the discretized stationary law, so it is
/// diagonalized through its symmetrization.
MarkovModel diffusion_transition_model(const DiffusionParams& params, std::size_t nodes = 201,
                                       std::optional<double> theta = std::nullopt);

/// Transition density of reflected Brownian motion on [0, 1] after time t
/// (cosine series, truncated once terms drop below 1e-16).
double reflected_brownian_density(double x, double y, double t);

}  // namespace regen
