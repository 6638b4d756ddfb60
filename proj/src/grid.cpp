#include "regen/grid.hpp"

#include <algorithm>
#include <cmath>

#include "regen/error.hpp"

namespace regen {

UniformGrid::UniformGrid(double lo, double hi, std::size_t points) : lo_(lo), hi_(hi), points_(points) {
  if (points < 2 || !(hi > lo)) {
    throw Error(ErrorCode::kInvalidArgument, "uniform grid needs hi > lo and at least 2 points");
  }
  step_ = (hi - lo) / static_cast<double>(points - 1);
}

std::vector<double> UniformGrid::nodes() const {
  std::vector<double> out(points_);
  for (std::size_t i = 0; i < points_; ++i) out[i] = at(i);
  return out;
}

std::pair<std::size_t, double> UniformGrid::locate(double x) const noexcept {
  if (!(x > lo_)) return {0, 0.0};
  if (!(x < hi_)) return {points_ - 2, 1.0};
  const double pos = (x - lo_) / step_;
  auto k = static_cast<std::size_t>(pos);
  if (k >= points_ - 1) k = points_ - 2;
  return {k, std::clamp(pos - static_cast<double>(k), 0.0, 1.0)};
}

PiecewiseLinear::PiecewiseLinear(UniformGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "tabulated values do not match grid size");
  }
}

PiecewiseLinear PiecewiseLinear::tabulate(const ScalarFn& f, UniformGrid grid) {
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = f(grid.at(i));
  return {grid, std::move(values)};
}

double PiecewiseLinear::operator()(double x) const noexcept {
  const auto [k, frac] = grid_.locate(x);
  return values_[k] + frac * (values_[k + 1] - values_[k]);
}

double simpson(const ScalarFn& f, double a, double b, std::size_t intervals) {
  if (intervals < 2) intervals = 2;
  if (intervals % 2 != 0) ++intervals;
  const double h = (b - a) / static_cast<double>(intervals);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i < intervals; ++i) {
    const double v = f(a + static_cast<double>(i) * h);
    (i % 2 ? odd : even) += v;
  }
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

double simpson_nodes(std::span<const double> values, double step) {
  if (values.size() < 3 || values.size() % 2 == 0) {
    throw Error(ErrorCode::kInvalidArgument, "simpson_nodes needs an odd number (>= 3) of samples");
  }
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) (i % 2 ? odd : even) += values[i];
  return step / 3.0 * (values.front() + values.back() + 4.0 * odd + 2.0 * even);
}

double trapezoid_nodes(std::span<const double> values, double step) {
  if (values.size() < 2) return 0.0;
  double inner = 0.0;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) inner += values[i];
  return step * (0.5 * (values.front() + values.back()) + inner);
}

double sample_piecewise_linear(const UniformGrid& grid, std::span<const double> weights, double u) {
  const std::size_t cells = grid.size() - 1;
  const double dx = grid.step();
  double total = 0.0;
  for (std::size_t k = 0; k < cells; ++k) total += 0.5 * dx * (weights[k] + weights[k + 1]);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw Error(ErrorCode::kNumeric, "piecewise-linear density has no positive mass");
  }
  double target = u * total;
  std::size_t k = 0;
  for (; k < cells; ++k) {
    const double mass = 0.5 * dx * (weights[k] + weights[k + 1]);
    if (target < mass || k + 1 == cells) break;
    target -= mass;
  }
  // Within the cell the density is q0 + (q1 - q0) s / dx, so the CDF is
  // q0 s + (q1 - q0) s^2 / (2 dx); solve for s.
  const double q0 = weights[k];
  const double q1 = weights[k + 1];
  const double slope = (q1 - q0) / dx;
  double s;
  if (std::abs(slope) < 1e-14 * std::max(1.0, std::abs(q0))) {
    s = q0 > 0.0 ? target / q0 : 0.5 * dx;
  } else {
    const double disc = std::max(0.0, q0 * q0 + 2.0 * slope * target);
    s = 2.0 * target / (q0 + std::sqrt(disc));
  }
  return std::clamp(grid.at(k) + std::clamp(s, 0.0, dx), grid.lo(), grid.hi());
}

}  // namespace regen
