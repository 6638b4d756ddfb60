#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "regen/chain.hpp"
#include "regen/diffusion.hpp"

namespace regen {

/// A model plus, for diffusions, the coefficients used to simulate it. The
/// MarkovModel of a diffusion preset is its grid transition density (used by
/// exact splitting and drift checks); trajectories come from Euler-Maruyama.
struct ModelPreset {
  std::string name;
  MarkovModel model;
  std::optional<DiffusionParams> diffusion;
  double x0 = 0.0;

  [[nodiscard]] Trajectory simulate(std::size_t n, std::uint64_t seed) const;
  [[nodiscard]] Trajectory simulate(std::size_t n, double x0, std::uint64_t seed) const;
  /// Stationary density of a diffusion preset at `points`; throws otherwise.
  [[nodiscard]] std::vector<double> true_density(const std::vector<double>& points) const;
};

/// Built-in presets:
///   "two-state"       P = [[0.7, 0.3], [0.1, 0.9]], S = {0}, nu = delta_0, theta = 0.6
///   "two-state-iid"   P = [[0.5, 0.5], [0.5, 0.5]], S = {0, 1}, nu = (1/2, 1/2), theta = 1
///   "iid-uniform"     p = 1 on [0,1]^2, S = [0,1], nu uniform, theta = 1
///   "reflected-bm"    b = 0, rho = 1, delta = 0.5, 100 substeps
///   "reflected-bump"  b = 0, rho = 1 + x^2 (1-x)^2, delta = 0.5, 100 substeps
///   "reflected-sine"  b = 0.5 sin(2 pi x), rho = 1, delta = 0.5, 100 substeps
ModelPreset builtin_preset(const std::string& name);
std::vector<std::string> builtin_preset_names();

/// Parse a model description:
///   {"preset": "<name>"}
///   {"kind": "finite", "matrix": [[..]], "small_set": [labels], "theta": t, "nu": [..]}
///   {"kind": "grid", "grid": G, "p_values": [[..]], "small_set": [lo, hi], "theta": t,
///    "nu": "uniform" | [values on the grid]}
///   {"kind": "diffusion", "grid": nodes, "theta": t (optional),
///    "diffusion": {"b_kind", "rho_kind", "delta", "substeps", "b_values", "rho_values"}}
/// b_values / rho_values (tabulations on an even grid of [0,1]) replace the kinds.
ModelPreset parse_model(const nlohmann::json& spec);

}  // namespace regen
