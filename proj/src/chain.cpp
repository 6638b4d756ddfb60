#include "regen/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "regen/error.hpp"

namespace regen {

// SmallSet ------------------------------------------------------------------

SmallSet SmallSet::everything() { return {}; }

SmallSet SmallSet::interval(double lo, double hi) {
  if (!(hi >= lo)) throw Error(ErrorCode::kInvalidArgument, "small set interval needs lo <= hi");
  SmallSet s;
  s.kind_ = Kind::kInterval;
  s.interval_ = {lo, hi};
  return s;
}

SmallSet SmallSet::states(std::vector<int> labels) {
  if (labels.empty()) throw Error(ErrorCode::kInvalidArgument, "small set needs at least one state");
  SmallSet s;
  s.kind_ = Kind::kStates;
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  s.labels_ = std::move(labels);
  return s;
}

bool SmallSet::contains(double x) const noexcept {
  switch (kind_) {
    case Kind::kEverything: return true;
    case Kind::kInterval: return interval_.contains(x);
    case Kind::kStates: {
      const int label = static_cast<int>(std::lround(x));
      return std::binary_search(labels_.begin(), labels_.end(), label);
    }
  }
  return false;
}

std::optional<Interval> SmallSet::as_interval() const {
  if (kind_ == Kind::kInterval) return interval_;
  return std::nullopt;
}

// GridDensity ---------------------------------------------------------------

GridDensity::GridDensity(UniformGrid axis, std::vector<double> values) : axis_(axis), values_(std::move(values)) {
  if (values_.size() != axis_.size() * axis_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "grid density needs G*G values");
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) throw Error(ErrorCode::kInvalidArgument, "grid density values must be finite and >= 0");
  }
}

double GridDensity::operator()(double x, double y) const noexcept {
  const auto [i, fx] = axis_.locate(x);
  const auto [j, fy] = axis_.locate(y);
  const double v00 = at(i, j);
  const double v01 = at(i, j + 1);
  const double v10 = at(i + 1, j);
  const double v11 = at(i + 1, j + 1);
  const double lo = v00 + fy * (v01 - v00);
  const double hi = v10 + fy * (v11 - v10);
  return lo + fx * (hi - lo);
}

std::vector<double> GridDensity::row_at(double x) const {
  const auto [i, fx] = axis_.locate(x);
  const auto r0 = row(i);
  const auto r1 = row(i + 1);
  std::vector<double> out(axis_.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = r0[j] + fx * (r1[j] - r0[j]);
  return out;
}

void GridDensity::normalize_rows() {
  const std::size_t g = axis_.size();
  for (std::size_t i = 0; i < g; ++i) {
    const double mass = trapezoid_nodes(row(i), axis_.step());
    if (!(mass > 0.0)) throw Error(ErrorCode::kNumeric, "transition density row has no mass");
    for (std::size_t j = 0; j < g; ++j) values_[i * g + j] /= mass;
  }
}

double GridDensity::min_value() const { return *std::min_element(values_.begin(), values_.end()); }
double GridDensity::max_value() const { return *std::max_element(values_.begin(), values_.end()); }

// MarkovModel ---------------------------------------------------------------

MarkovModel MarkovModel::finite(Eigen::MatrixXd transition, SmallSet small_set, double theta,
                                std::vector<double> nu, std::string tag) {
  const auto k = transition.rows();
  if (k < 1 || transition.cols() != k) throw Error(ErrorCode::kInvalidArgument, "transition matrix must be square");
  if (static_cast<Eigen::Index>(nu.size()) != k) throw Error(ErrorCode::kDimensionMismatch, "nu must have one weight per state");
  if (!(theta > 0.0 && theta <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "theta must lie in (0, 1]");
  if ((transition.array() < 0.0).any() || !transition.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "transition probabilities must be finite and >= 0");
  }
  for (double w : nu) {
    if (w < 0.0 || !std::isfinite(w)) throw Error(ErrorCode::kInvalidArgument, "nu weights must be >= 0");
  }
  MarkovModel m;
  m.kind_ = Kind::kFinite;
  m.tag_ = std::move(tag);
  m.matrix_ = std::move(transition);
  m.small_set_ = std::move(small_set);
  m.theta_ = theta;
  m.nu_finite_ = std::move(nu);
  return m;
}

MarkovModel MarkovModel::grid(GridDensity density, SmallSet small_set, double theta, PiecewiseLinear nu,
                              std::string tag) {
  if (!(theta > 0.0 && theta <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "theta must lie in (0, 1]");
  MarkovModel m;
  m.kind_ = Kind::kGrid;
  m.tag_ = std::move(tag);
  m.density_ = std::move(density);
  m.small_set_ = std::move(small_set);
  m.theta_ = theta;
  m.nu_grid_ = std::move(nu);
  return m;
}

Interval MarkovModel::state_space() const noexcept {
  if (kind_ == Kind::kFinite) return {0.0, static_cast<double>(matrix_.rows() - 1)};
  return {density_.axis().lo(), density_.axis().hi()};
}

int MarkovModel::label(double x) const {
  const long l = std::lround(x);
  if (l < 0 || l >= matrix_.rows() || std::abs(x - static_cast<double>(l)) > 1e-9) {
    std::ostringstream msg;
    msg << "state " << x << " is not a label of this finite chain";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  return static_cast<int>(l);
}

double MarkovModel::transition_density(double x, double y) const {
  if (kind_ == Kind::kFinite) return matrix_(label(x), label(y));
  return density_(x, y);
}

double MarkovModel::nu_density(double y) const {
  if (kind_ == Kind::kFinite) return nu_finite_[static_cast<std::size_t>(label(y))];
  const auto& g = nu_grid_.grid();
  if (y < g.lo() || y > g.hi()) return 0.0;
  return nu_grid_(y);
}

namespace {

int sample_categorical(std::span<const double> weights, double u) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw Error(ErrorCode::kNumeric, "categorical weights have no mass");
  double target = u * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (target < weights[i]) return static_cast<int>(i);
    target -= weights[i];
  }
  // Round-off: return the last state with positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return static_cast<int>(i);
  }
  return 0;
}

}  // namespace

double MarkovModel::sample_next(double x, Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  if (kind_ == Kind::kFinite) {
    const Eigen::VectorXd row = matrix_.row(label(x)).transpose();
    return sample_categorical({row.data(), static_cast<std::size_t>(row.size())}, u);
  }
  const auto row = density_.row_at(x);
  return sample_piecewise_linear(density_.axis(), row, u);
}

double MarkovModel::sample_nu(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  if (kind_ == Kind::kFinite) return sample_categorical(nu_finite_, u);
  return sample_piecewise_linear(nu_grid_.grid(), nu_grid_.values(), u);
}

double MarkovModel::sample_residual(double x, Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  if (kind_ == Kind::kFinite) {
    const int i = label(x);
    std::vector<double> w(static_cast<std::size_t>(matrix_.cols()));
    for (std::size_t j = 0; j < w.size(); ++j) {
      w[j] = std::max(0.0, matrix_(i, static_cast<Eigen::Index>(j)) - theta_ * nu_finite_[j]);
    }
    return sample_categorical(w, u);
  }
  auto w = density_.row_at(x);
  const auto& axis = density_.axis();
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = std::max(0.0, w[j] - theta_ * nu_density(axis.at(j)));
  return sample_piecewise_linear(axis, w, u);
}

std::vector<double> MarkovModel::evaluation_grid() const {
  if (kind_ == Kind::kFinite) {
    std::vector<double> out(static_cast<std::size_t>(matrix_.rows()));
    std::iota(out.begin(), out.end(), 0.0);
    return out;
  }
  return density_.axis().nodes();
}

const Eigen::MatrixXd& MarkovModel::matrix() const {
  if (kind_ != Kind::kFinite) throw Error(ErrorCode::kInvalidArgument, "model has no transition matrix");
  return matrix_;
}

const GridDensity& MarkovModel::density() const {
  if (kind_ != Kind::kGrid) throw Error(ErrorCode::kInvalidArgument, "model has no grid density");
  return density_;
}

ModelCheck check_model(const MarkovModel& model) {
  ModelCheck check;
  const auto points = model.evaluation_grid();
  if (model.kind() == MarkovModel::Kind::kFinite) {
    const auto& P = model.matrix();
    for (Eigen::Index i = 0; i < P.rows(); ++i) check.max_row_error = std::max(check.max_row_error, std::abs(P.row(i).sum() - 1.0));
    double nu_mass = 0.0;
    for (double x : points) {
      if (model.in_small_set(x)) nu_mass += model.nu_density(x);
    }
    check.nu_mass_error = std::abs(nu_mass - 1.0);
  } else {
    const auto& p = model.density();
    const double step = p.axis().step();
    for (std::size_t i = 0; i < p.size(); ++i) {
      check.max_row_error = std::max(check.max_row_error, std::abs(trapezoid_nodes(p.row(i), step) - 1.0));
    }
    const auto& nu = model.nu_table();
    check.nu_mass_error = std::abs(trapezoid_nodes(nu.values(), nu.grid().step()) - 1.0);
  }
  for (double x : points) {
    if (!model.in_small_set(x)) continue;
    for (double y : points) {
      const double gap = model.theta() * model.nu_density(y) - model.transition_density(x, y);
      check.max_minorization_gap = std::max(check.max_minorization_gap, gap);
    }
  }
  return check;
}

Trajectory simulate_chain(const MarkovModel& model, std::size_t n, double x0, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "simulate_chain needs n >= 1");
  const auto space = model.state_space();
  if (!space.contains(x0)) throw Error(ErrorCode::kInvalidArgument, "x0 lies outside the state space");
  Trajectory traj;
  traj.seed = seed;
  traj.model_tag = model.tag();
  traj.samples.resize(n);
  traj.samples[0] = x0;
  Rng rng = make_stream(seed, Stream::kSimulation);
  for (std::size_t t = 1; t < n; ++t) traj.samples[t] = model.sample_next(traj.samples[t - 1], rng);
  return traj;
}

DriftReport drift_check(const MarkovModel& model, const ScalarFn& V, double c, double b_const,
                        std::span<const double> grid, double tolerance) {
  if (!(c > 0.0)) throw Error(ErrorCode::kInvalidArgument, "drift constant c must be positive");
  DriftReport report;
  if (grid.empty()) {
    report.points = model.evaluation_grid();
  } else {
    report.points.assign(grid.begin(), grid.end());
  }
  report.max_violation = -std::numeric_limits<double>::infinity();

  // exp(V) on the integration nodes; grid models integrate cell by cell with
  // Simpson using the midpoint, which is exact when V is constant because the
  // density is linear on each cell.
  std::vector<double> expV_nodes;
  std::vector<double> expV_mid;
  if (model.kind() == MarkovModel::Kind::kFinite) {
    for (double y : model.evaluation_grid()) expV_nodes.push_back(std::exp(V(y)));
  } else {
    const auto& axis = model.density().axis();
    for (std::size_t j = 0; j < axis.size(); ++j) expV_nodes.push_back(std::exp(V(axis.at(j))));
    for (std::size_t j = 0; j + 1 < axis.size(); ++j) expV_mid.push_back(std::exp(V(axis.at(j) + 0.5 * axis.step())));
  }

  for (double x : report.points) {
    double integral = 0.0;
    if (model.kind() == MarkovModel::Kind::kFinite) {
      const auto& P = model.matrix();
      const auto i = static_cast<Eigen::Index>(std::lround(x));
      for (Eigen::Index j = 0; j < P.cols(); ++j) integral += P(i, j) * expV_nodes[static_cast<std::size_t>(j)];
    } else {
      const auto row = model.density().row_at(x);
      const double dx = model.density().axis().step();
      for (std::size_t j = 0; j + 1 < row.size(); ++j) {
        const double mid = 0.5 * (row[j] + row[j + 1]);
        integral += dx / 6.0 * (row[j] * expV_nodes[j] + 4.0 * mid * expV_mid[j] + row[j + 1] * expV_nodes[j + 1]);
      }
    }
    const double lhs = std::exp(-V(x)) * integral;
    const double rhs = std::exp(-2.0 / c + (model.in_small_set(x) ? b_const : 0.0));
    if (!std::isfinite(lhs) || !std::isfinite(rhs)) {
      std::ostringstream msg;
      msg << "drift quadrature is not finite at x = " << x;
      throw Error(ErrorCode::kNumeric, msg.str());
    }
    const bool ok = lhs - rhs <= tolerance * std::max(1.0, rhs);
    report.lhs.push_back(lhs);
    report.rhs.push_back(rhs);
    report.holds.push_back(ok);
    report.all_hold = report.all_hold && ok;
    report.max_violation = std::max(report.max_violation, lhs - rhs);
  }
  return report;
}

}  // namespace regen
