#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "regen/grid.hpp"
#include "regen/rng.hpp"

namespace regen {

/// Set S on which the minorization p(x, .) >= theta nu'(.) holds. Either an
/// interval of a continuous state space or a list of labels of a finite chain.
class SmallSet {
 public:
  static SmallSet everything();
  static SmallSet interval(double lo, double hi);
  static SmallSet states(std::vector<int> labels);

  [[nodiscard]] bool contains(double x) const noexcept;
  [[nodiscard]] bool is_everything() const noexcept { return kind_ == Kind::kEverything; }
  [[nodiscard]] std::optional<Interval> as_interval() const;
  [[nodiscard]] const std::vector<int>& labels() const noexcept { return labels_; }

 private:
  enum class Kind { kEverything, kInterval, kStates };
  Kind kind_ = Kind::kEverything;
  Interval interval_{};
  std::vector<int> labels_;
};

/// G x G table of a transition density on [lo, hi]^2 with bilinear
/// interpolation. Row i holds p(x_i, .).
class GridDensity {
 public:
  GridDensity() = default;
  GridDensity(UniformGrid axis, std::vector<double> values);

  double operator()(double x, double y) const noexcept;
  [[nodiscard]] const UniformGrid& axis() const noexcept { return axis_; }
  [[nodiscard]] std::size_t size() const noexcept { return axis_.size(); }
  [[nodiscard]] double at(std::size_t i, std::size_t j) const noexcept { return values_[i * axis_.size() + j]; }
  [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * axis_.size(), axis_.size()};
  }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  /// Node values of y -> p(x, y) for an off-grid x (linear in x between rows).
  [[nodiscard]] std::vector<double> row_at(double x) const;

  /// Rescale every row so that its piecewise-linear interpolant integrates to 1.
  void normalize_rows();
  [[nodiscard]] double min_value() const;
  [[nodiscard]] double max_value() const;

 private:
  UniformGrid axis_;
  std::vector<double> values_;
};

/// Markov kernel with a one-step (m = 1) minorization pair (theta, nu).
///
/// Two kinds are supported: finite chains with a row-stochastic matrix, whose
/// states are the labels 0..k-1 carried as doubles, and continuous chains on an
/// interval whose transition density is a GridDensity. Densities of finite
/// chains are with respect to counting measure.
class MarkovModel {
 public:
  enum class Kind { kFinite, kGrid };

  static MarkovModel finite(Eigen::MatrixXd transition, SmallSet small_set, double theta,
                            std::vector<double> nu, std::string tag = "finite");
  static MarkovModel grid(GridDensity density, SmallSet small_set, double theta, PiecewiseLinear nu,
                          std::string tag = "grid");

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& tag() const noexcept { return tag_; }
  [[nodiscard]] double theta() const noexcept { return theta_; }
  [[nodiscard]] int period() const noexcept { return 1; }
  [[nodiscard]] const SmallSet& small_set() const noexcept { return small_set_; }
  [[nodiscard]] Interval state_space() const noexcept;

  [[nodiscard]] double transition_density(double x, double y) const;
  [[nodiscard]] bool in_small_set(double x) const noexcept { return small_set_.contains(x); }
  [[nodiscard]] double nu_density(double y) const;

  /// Draw X_{t+1} ~ p(x, .).
  double sample_next(double x, Rng& rng) const;
  /// Draw from nu.
  double sample_nu(Rng& rng) const;
  /// Draw from the residual kernel (p(x, .) - theta nu) / (1 - theta), x in S.
  double sample_residual(double x, Rng& rng) const;

  /// Evaluation points used by invariant checks and drift checks: the labels of
  /// a finite chain or the nodes of the density grid.
  [[nodiscard]] std::vector<double> evaluation_grid() const;

  [[nodiscard]] const Eigen::MatrixXd& matrix() const;
  [[nodiscard]] const GridDensity& density() const;
  [[nodiscard]] const std::vector<double>& nu_weights() const noexcept { return nu_finite_; }
  [[nodiscard]] const PiecewiseLinear& nu_table() const noexcept { return nu_grid_; }

 private:
  MarkovModel() = default;
  [[nodiscard]] int label(double x) const;

  Kind kind_ = Kind::kFinite;
  std::string tag_;
  Eigen::MatrixXd matrix_;
  GridDensity density_;
  SmallSet small_set_;
  double theta_ = 0.0;
  std::vector<double> nu_finite_;
  PiecewiseLinear nu_grid_;
};

struct ModelCheck {
  double max_row_error = 0.0;       // max_x |int p(x, .) - 1|
  double nu_mass_error = 0.0;       // |int_S nu' - 1|
  double max_minorization_gap = 0.0;  // max over S x E of (theta nu'(y) - p(x, y))+
  [[nodiscard]] bool ok(double tol = 1e-6) const {
    return max_row_error <= tol && nu_mass_error <= tol && max_minorization_gap <= tol;
  }
};

/// Evaluate the MarkovModel invariants on the model's evaluation grid.
ModelCheck check_model(const MarkovModel& model);

struct Trajectory {
  std::vector<double> samples;
  std::uint64_t seed = 0;
  std::string model_tag;

  [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
};

/// X_0 = x0 and X_{t+1} ~ p(X_t, .), t < n - 1.
Trajectory simulate_chain(const MarkovModel& model, std::size_t n, double x0, std::uint64_t seed);

struct DriftReport {
  std::vector<double> points;
  std::vector<double> lhs;  // exp(-V(x)) P(exp V)(x)
  std::vector<double> rhs;  // exp(-2/c + b 1_S(x))
  std::vector<bool> holds;
  double max_violation = 0.0;  // max_x lhs - rhs; <= tolerance iff all hold
  bool all_hold = true;
};

/// Geometric drift check exp{-V(x)} P(exp V)(x) <= exp{-2/c + b_const 1_S(x)}
/// at each point of `grid` (defaults to the model's evaluation grid).
DriftReport drift_check(const MarkovModel& model, const ScalarFn& V, double c, double b_const,
                        std::span<const double> grid = {}, double tolerance = 1e-12);

}  // namespace regen
