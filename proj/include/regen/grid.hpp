#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace regen {

using ScalarFn = std::function<double(double)>;

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  [[nodiscard]] bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  [[nodiscard]] double length() const noexcept { return hi - lo; }
};

/// Equally spaced nodes lo = x_0 < ... < x_{points-1} = hi.
class UniformGrid {
 public:
  UniformGrid() = default;
  UniformGrid(double lo, double hi, std::size_t points);

  [[nodiscard]] double lo() const noexcept { return lo_; }
  [[nodiscard]] double hi() const noexcept { return hi_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_; }
  [[nodiscard]] double step() const noexcept { return step_; }
  [[nodiscard]] double at(std::size_t i) const noexcept {
    return i + 1 == points_ ? hi_ : lo_ + static_cast<double>(i) * step_;
  }
  [[nodiscard]] std::vector<double> nodes() const;

  /// Cell index k and fractional offset in [0,1] such that x lies between
  /// nodes k and k+1. Points outside [lo, hi] are clamped.
  [[nodiscard]] std::pair<std::size_t, double> locate(double x) const noexcept;

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::size_t points_ = 2;
  double step_ = 1.0;
};

/// Linear interpolation of tabulated values on a uniform grid.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  PiecewiseLinear(UniformGrid grid, std::vector<double> values);
  static PiecewiseLinear tabulate(const ScalarFn& f, UniformGrid grid);

  double operator()(double x) const noexcept;
  [[nodiscard]] const UniformGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

 private:
  UniformGrid grid_;
  std::vector<double> values_;
};

// Quadrature.

/// Composite Simpson with `intervals` (rounded up to even) subintervals.
double simpson(const ScalarFn& f, double a, double b, std::size_t intervals = 1024);

/// Composite Simpson on an odd number of equally spaced samples.
double simpson_nodes(std::span<const double> values, double step);

/// Trapezoid rule; exact for piecewise-linear interpolants of the samples.
double trapezoid_nodes(std::span<const double> values, double step);

/// Sample from the piecewise-linear density through (grid, weights) by inverting
/// its CDF. Weights need not be normalized but must be nonnegative with
/// positive total mass. `u` is uniform on [0,1).
double sample_piecewise_linear(const UniformGrid& grid, std::span<const double> weights, double u);

}  // namespace regen
