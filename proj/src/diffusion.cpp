#include "regen/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "regen/error.hpp"

namespace regen {

namespace {

constexpr double kPi = std::numbers::pi;

double checked_square(const ScalarFn& dispersion, double x) {
  const double r = dispersion(x);
  const double r2 = r * r;
  if (!std::isfinite(r2) || !(r2 > 0.0)) {
    std::ostringstream msg;
    msg << "rho^2 vanishes or is not finite at x = " << x;
    throw Error(ErrorCode::kSingularDispersion, msg.str());
  }
  return r2;
}

/// Cumulative integral of 2 b / rho^2 from 0 with per-cell Simpson on a fine
/// uniform grid, plus point evaluation anywhere in [0, 1].
class DriftIntegral {
 public:
  DriftIntegral(const ScalarFn& drift, const ScalarFn& dispersion, std::size_t intervals)
      : drift_(drift), dispersion_(dispersion), grid_(0.0, 1.0, intervals + 1), cumulative_(intervals + 1, 0.0) {
    for (std::size_t k = 0; k < intervals; ++k) {
      cumulative_[k + 1] = cumulative_[k] + panel(grid_.at(k), grid_.at(k + 1));
    }
  }

  double operator()(double x) const {
    const auto [k, frac] = grid_.locate(x);
    if (frac == 0.0) return cumulative_[k];
    return cumulative_[k] + panel(grid_.at(k), std::clamp(x, grid_.at(k), grid_.at(k + 1)));
  }

  [[nodiscard]] double at_node(std::size_t k) const { return cumulative_[k]; }
  [[nodiscard]] const UniformGrid& grid() const { return grid_; }

 private:
  [[nodiscard]] double integrand(double y) const { return 2.0 * drift_(y) / checked_square(dispersion_, y); }
  [[nodiscard]] double panel(double a, double b) const {
    return (b - a) / 6.0 * (integrand(a) + 4.0 * integrand(0.5 * (a + b)) + integrand(b));
  }

  const ScalarFn& drift_;
  const ScalarFn& dispersion_;
  UniformGrid grid_;
  std::vector<double> cumulative_;
};

}  // namespace

ScalarFn drift_preset(const std::string& kind) {
  if (kind == "zero") return [](double) { return 0.0; };
  if (kind == "sine") return [](double x) { return 0.5 * std::sin(2.0 * kPi * x); };
  throw Error(ErrorCode::kConfig, "unknown drift preset '" + kind + "'");
}

ScalarFn dispersion_preset(const std::string& kind) {
  if (kind == "one") return [](double) { return 1.0; };
  if (kind == "bump") return [](double x) { return 1.0 + x * x * (1.0 - x) * (1.0 - x); };
  throw Error(ErrorCode::kConfig, "unknown dispersion preset '" + kind + "'");
}

DiffusionParams make_diffusion(const std::string& drift_kind, const std::string& dispersion_kind, double delta,
                               int substeps) {
  DiffusionParams p;
  p.drift = drift_preset(drift_kind);
  p.dispersion = dispersion_preset(dispersion_kind);
  p.delta = delta;
  p.substeps = substeps;
  p.tag = "diffusion(" + drift_kind + "," + dispersion_kind + ")";
  return p;
}

DiffusionCheck check_diffusion(const DiffusionParams& params, std::size_t points) {
  DiffusionCheck check;
  const UniformGrid grid(0.0, 1.0, std::max<std::size_t>(points, 5));
  const double h = grid.step();
  const auto& b = params.drift;
  const auto& rho = params.dispersion;

  check.drift_at_endpoints = std::max(std::abs(b(0.0)), std::abs(b(1.0)));
  constexpr double eps = 1e-7;
  check.dispersion_slope_at_endpoints =
      std::max(std::abs(rho(eps) - rho(0.0)) / eps, std::abs(rho(1.0) - rho(1.0 - eps)) / eps);

  double sup_b = 0, sup_db = 0, sup_r = 0, sup_dr = 0, sup_d2r = 0;
  check.min_dispersion_squared = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.at(i);
    const double xl = i == 0 ? x : grid.at(i - 1);
    const double xr = i + 1 == grid.size() ? x : grid.at(i + 1);
    const double r = rho(x);
    sup_b = std::max(sup_b, std::abs(b(x)));
    sup_r = std::max(sup_r, std::abs(r));
    sup_db = std::max(sup_db, std::abs((b(xr) - b(xl)) / (xr - xl)));
    sup_dr = std::max(sup_dr, std::abs((rho(xr) - rho(xl)) / (xr - xl)));
    if (i > 0 && i + 1 < grid.size()) sup_d2r = std::max(sup_d2r, std::abs((rho(xr) - 2.0 * r + rho(xl)) / (h * h)));
    check.min_dispersion_squared = std::min(check.min_dispersion_squared, r * r);
  }
  check.sup_norm = std::max({sup_b, sup_db, sup_r, sup_dr, sup_d2r});

  constexpr double tol = 1e-6;
  if (check.drift_at_endpoints > tol) check.violations.emplace_back("b(0) and b(1) must vanish");
  if (check.dispersion_slope_at_endpoints > tol) check.violations.emplace_back("rho'(0) and rho'(1) must vanish");
  if (check.sup_norm > params.sup_bound) check.violations.emplace_back("sup norms exceed the bound B");
  if (!(check.min_dispersion_squared >= params.dispersion_floor) || !(params.dispersion_floor > 0.0)) {
    check.violations.emplace_back("rho^2 falls below the dispersion floor");
  }
  if (!(params.delta > 0.0)) check.violations.emplace_back("sampling interval must be positive");
  if (params.substeps < 1) check.violations.emplace_back("at least one Euler substep is required");
  return check;
}

double reflect_unit(double x) noexcept {
  // Folding is periodic with period 2.
  if (x >= 0.0 && x <= 1.0) return x;
  double y = std::fmod(x, 2.0);
  if (y < 0.0) y += 2.0;
  return y <= 1.0 ? y : 2.0 - y;
}

Trajectory simulate_reflected_diffusion(const DiffusionParams& params, std::size_t n, double x0, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "simulate_reflected_diffusion needs n >= 1");
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "x0 must lie in [0, 1]");
  if (!(params.delta > 0.0) || params.substeps < 1) {
    throw Error(ErrorCode::kInvalidArgument, "need delta > 0 and substeps >= 1");
  }
  Trajectory traj;
  traj.seed = seed;
  traj.model_tag = params.tag;
  traj.samples.resize(n);
  traj.samples[0] = x0;

  Rng rng = make_stream(seed, Stream::kSimulation);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double dt = params.delta / params.substeps;
  const double sqdt = std::sqrt(dt);
  double x = x0;
  for (std::size_t t = 1; t < n; ++t) {
    for (int s = 0; s < params.substeps; ++s) {
      const double b = params.drift(x);
      const double r = params.dispersion(x);
      if (!std::isfinite(b) || !std::isfinite(r)) {
        std::ostringstream msg;
        msg << "drift or dispersion is not finite at state " << x;
        throw Error(ErrorCode::kNumeric, msg.str());
      }
      x = reflect_unit(x + b * dt + r * sqdt * normal(rng));
    }
    traj.samples[t] = x;
  }
  return traj;
}

StationaryDensity stationary_density(const ScalarFn& drift, const ScalarFn& dispersion, std::span<const double> points,
                                     std::size_t intervals) {
  if (intervals < 2) intervals = 2;
  if (intervals % 2) ++intervals;
  const DriftIntegral integral(drift, dispersion, intervals);
  const auto& fine = integral.grid();

  std::vector<double> unnormalized(fine.size());
  for (std::size_t k = 0; k < fine.size(); ++k) {
    unnormalized[k] = std::exp(integral.at_node(k)) / checked_square(dispersion, fine.at(k));
  }
  StationaryDensity out;
  out.normalizer = simpson_nodes(unnormalized, fine.step());
  out.values.reserve(points.size());
  for (double x : points) {
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "stationary density is defined on [0, 1]");
    const double v = std::exp(integral(x)) / (out.normalizer * checked_square(dispersion, x));
    if (!std::isfinite(v) || !(v > 0.0)) throw Error(ErrorCode::kNumeric, "stationary density is not positive and finite");
    out.values.push_back(v);
  }
  return out;
}

std::pair<double, double> stationary_bounds(double sup_bound, double dispersion_floor) {
  // |int 2b/rho^2| <= 2B/floor and floor <= rho^2 <= B^2, applied to both the
  // numerator and the normalizer.
  const double spread = std::exp(4.0 * sup_bound / dispersion_floor);
  const double ratio = sup_bound * sup_bound / dispersion_floor;
  return {1.0 / (spread * ratio), spread * ratio};
}

MarkovModel diffusion_transition_model(const DiffusionParams& params, std::size_t nodes, std::optional<double> theta) {
  if (nodes < 3) throw Error(ErrorCode::kInvalidArgument, "diffusion grid needs at least 3 nodes");
  const auto check = check_diffusion(params);
  if (!check.ok()) throw Error(ErrorCode::kInvalidArgument, "diffusion parameters violate: " + check.violations.front());

  const UniformGrid axis(0.0, 1.0, nodes);
  const double dx = axis.step();
  const DriftIntegral integral(params.drift, params.dispersion, 4096);
  const auto N = static_cast<Eigen::Index>(nodes);

  // Node masses m_i = pi(x_i) V_i (unnormalized) and face conductances
  // A_{i+1/2} = (pi rho^2)(face) = exp(I(face)).
  Eigen::VectorXd mass(N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const double x = axis.at(static_cast<std::size_t>(i));
    const double volume = (i == 0 || i == N - 1) ? 0.5 * dx : dx;
    mass(i) = std::exp(integral(x)) / checked_square(params.dispersion, x) * volume;
  }
  Eigen::MatrixXd sym = Eigen::MatrixXd::Zero(N, N);
  for (Eigen::Index i = 0; i + 1 < N; ++i) {
    const double face = axis.at(static_cast<std::size_t>(i)) + 0.5 * dx;
    const double flux = std::exp(integral(face)) / (2.0 * dx);
    // m_i Q_{i,i+1} = m_{i+1} Q_{i+1,i} = flux; symmetrized entry flux / sqrt(m_i m_{i+1}).
    const double off = flux / std::sqrt(mass(i) * mass(i + 1));
    sym(i, i + 1) = off;
    sym(i + 1, i) = off;
    sym(i, i) -= flux / mass(i);
    sym(i + 1, i + 1) -= flux / mass(i + 1);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  if (eig.info() != Eigen::Success) throw Error(ErrorCode::kNumeric, "generator eigendecomposition failed");
  const Eigen::VectorXd decay = (params.delta * eig.eigenvalues().array()).exp();
  const Eigen::MatrixXd& U = eig.eigenvectors();
  const Eigen::MatrixXd symT = U * decay.asDiagonal() * U.transpose();
  const Eigen::VectorXd root = mass.cwiseSqrt();

  std::vector<double> values(nodes * nodes);
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index j = 0; j < N; ++j) {
      const double volume = (j == 0 || j == N - 1) ? 0.5 * dx : dx;
      const double prob = symT(i, j) * root(j) / root(i);
      values[static_cast<std::size_t>(i * N + j)] = std::max(0.0, prob) / volume;
    }
  }
  GridDensity density(axis, std::move(values));
  density.normalize_rows();
  const double floor = density.min_value();
  const double th = theta.value_or(floor);
  if (!(th > 0.0) || th > floor * (1.0 + 1e-12)) {
    throw Error(ErrorCode::kMinorizationViolation, "theta must lie in (0, min p]");
  }
  const UniformGrid unit(0.0, 1.0, 2);
  return MarkovModel::grid(std::move(density), SmallSet::interval(0.0, 1.0), th, PiecewiseLinear(unit, {1.0, 1.0}),
                           params.tag);
}

double reflected_brownian_density(double x, double y, double t) {
  double sum = 1.0;
  for (int k = 1; k < 10000; ++k) {
    const double kk = static_cast<double>(k) * kPi;
    const double w = std::exp(-0.5 * kk * kk * t);
    if (w < 1e-17) break;
    sum += 2.0 * w * std::cos(kk * x) * std::cos(kk * y);
  }
  return sum;
}

}  // namespace regen
