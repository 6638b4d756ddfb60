#include "regen/presets.hpp"

#include "regen/error.hpp"

namespace regen {

namespace {

using nlohmann::json;

ModelPreset diffusion_preset(const std::string& name, const std::string& drift, const std::string& dispersion,
                             double delta, int substeps, std::size_t nodes, std::optional<double> theta) {
  auto params = make_diffusion(drift, dispersion, delta, substeps);
  params.tag = name;
  auto model = diffusion_transition_model(params, nodes, theta);
  return {name, std::move(model), std::move(params), 0.5};
}

ScalarFn tabulated(const json& values) {
  const auto v = values.get<std::vector<double>>();
  if (v.size() < 2) throw Error(ErrorCode::kConfig, "tabulated coefficients need at least two values");
  return [table = PiecewiseLinear(UniformGrid(0.0, 1.0, v.size()), v)](double x) { return table(x); };
}

}  // namespace

Trajectory ModelPreset::simulate(std::size_t n, std::uint64_t seed) const { return simulate(n, x0, seed); }

Trajectory ModelPreset::simulate(std::size_t n, double start, std::uint64_t seed) const {
  if (diffusion) return simulate_reflected_diffusion(*diffusion, n, start, seed);
  return simulate_chain(model, n, start, seed);
}

std::vector<double> ModelPreset::true_density(const std::vector<double>& points) const {
  if (!diffusion) throw Error(ErrorCode::kConfig, "true density is only available for diffusion presets");
  return stationary_density(diffusion->drift, diffusion->dispersion, points).values;
}

std::vector<std::string> builtin_preset_names() {
  return {"two-state", "two-state-iid", "iid-uniform", "reflected-bm", "reflected-bump", "reflected-sine"};
}

ModelPreset builtin_preset(const std::string& name) {
  if (name == "two-state") {
    Eigen::MatrixXd P(2, 2);
    P << 0.7, 0.3, 0.1, 0.9;
    return {name, MarkovModel::finite(P, SmallSet::states({0}), 0.6, {1.0, 0.0}, name), std::nullopt, 0.0};
  }
  if (name == "two-state-iid") {
    Eigen::MatrixXd P(2, 2);
    P << 0.5, 0.5, 0.5, 0.5;
    return {name, MarkovModel::finite(P, SmallSet::states({0, 1}), 1.0, {0.5, 0.5}, name), std::nullopt, 0.0};
  }
  if (name == "iid-uniform") {
    const UniformGrid axis(0.0, 1.0, 2);
    return {name,
            MarkovModel::grid(GridDensity(axis, {1.0, 1.0, 1.0, 1.0}), SmallSet::interval(0.0, 1.0), 1.0,
                              PiecewiseLinear(axis, {1.0, 1.0}), name),
            std::nullopt, 0.5};
  }
  if (name == "reflected-bm") return diffusion_preset(name, "zero", "one", 0.5, 100, 201, std::nullopt);
  if (name == "reflected-bump") return diffusion_preset(name, "zero", "bump", 0.5, 100, 201, std::nullopt);
  if (name == "reflected-sine") return diffusion_preset(name, "sine", "one", 0.5, 100, 201, std::nullopt);
  throw Error(ErrorCode::kConfig, "unknown model preset '" + name + "'");
}

ModelPreset parse_model(const json& spec) {
  try {
    if (spec.is_string()) return builtin_preset(spec.get<std::string>());
    if (spec.contains("preset")) return builtin_preset(spec.at("preset").get<std::string>());
    const auto kind = spec.at("kind").get<std::string>();
    if (kind == "finite") {
      const auto rows = spec.at("matrix").get<std::vector<std::vector<double>>>();
      const auto k = static_cast<Eigen::Index>(rows.size());
      Eigen::MatrixXd P(k, k);
      for (Eigen::Index i = 0; i < k; ++i) {
        if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != k) {
          throw Error(ErrorCode::kConfig, "transition matrix must be square");
        }
        for (Eigen::Index j = 0; j < k; ++j) P(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
      auto small = spec.contains("small_set") ? SmallSet::states(spec.at("small_set").get<std::vector<int>>())
                                              : SmallSet::everything();
      ModelPreset p{spec.value("name", std::string("finite")),
                    MarkovModel::finite(P, std::move(small), spec.at("theta").get<double>(),
                                        spec.at("nu").get<std::vector<double>>(), spec.value("name", std::string("finite"))),
                    std::nullopt, spec.value("x0", 0.0)};
      return p;
    }
    if (kind == "grid") {
      const auto g = spec.at("grid").get<std::size_t>();
      const UniformGrid axis(0.0, 1.0, g);
      const auto rows = spec.at("p_values").get<std::vector<std::vector<double>>>();
      if (rows.size() != g) throw Error(ErrorCode::kConfig, "p_values must have `grid` rows");
      std::vector<double> values;
      for (const auto& r : rows) {
        if (r.size() != g) throw Error(ErrorCode::kConfig, "p_values rows must have `grid` entries");
        values.insert(values.end(), r.begin(), r.end());
      }
      SmallSet small = SmallSet::interval(0.0, 1.0);
      if (spec.contains("small_set")) {
        const auto s = spec.at("small_set").get<std::vector<double>>();
        if (s.size() != 2) throw Error(ErrorCode::kConfig, "grid small_set must be [lo, hi]");
        small = SmallSet::interval(s[0], s[1]);
      }
      PiecewiseLinear nu;
      const auto nu_spec = spec.value("nu", json("uniform"));
      if (nu_spec.is_string()) {
        const auto iv = small.as_interval().value_or(Interval{0.0, 1.0});
        nu = PiecewiseLinear(UniformGrid(iv.lo, iv.hi, 2), {1.0 / iv.length(), 1.0 / iv.length()});
      } else {
        nu = PiecewiseLinear(axis, nu_spec.get<std::vector<double>>());
      }
      const auto name = spec.value("name", std::string("grid"));
      return {name, MarkovModel::grid(GridDensity(axis, std::move(values)), std::move(small), spec.at("theta").get<double>(),
                                      std::move(nu), name),
              std::nullopt, spec.value("x0", 0.5)};
    }
    if (kind == "diffusion") {
      const auto& d = spec.at("diffusion");
      DiffusionParams params = make_diffusion(d.value("b_kind", std::string("zero")), d.value("rho_kind", std::string("one")),
                                              d.value("delta", 0.5), d.value("substeps", 100));
      if (d.contains("b_values")) params.drift = tabulated(d.at("b_values"));
      if (d.contains("rho_values")) params.dispersion = tabulated(d.at("rho_values"));
      params.sup_bound = d.value("sup_bound", params.sup_bound);
      params.dispersion_floor = d.value("dispersion_floor", params.dispersion_floor);
      const auto name = spec.value("name", params.tag);
      params.tag = name;
      std::optional<double> theta;
      if (spec.contains("theta")) theta = spec.at("theta").get<double>();
      ModelPreset p{name, diffusion_transition_model(params, spec.value("grid", std::size_t{201}), theta), params,
                    spec.value("x0", 0.5)};
      return p;
    }
    throw Error(ErrorCode::kConfig, "unknown model kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("model spec: ") + e.what());
  }
}

}  // namespace regen
