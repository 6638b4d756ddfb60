#include "regen/stats.hpp"

#include <algorithm>
#include <cmath>

#include "regen/error.hpp"

namespace regen {

Summary summarize(std::span<const double> values) {
  Summary s;
  s.count = values.size();
  if (values.empty()) return s;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  s.mean = mean;
  if (values.size() > 1) {
    s.variance = ss / static_cast<double>(values.size() - 1);
    s.standard_error = std::sqrt(s.variance / static_cast<double>(values.size()));
  }
  return s;
}

double median(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "median of an empty sequence");
  const auto mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::kDimensionMismatch, "correlation needs equal lengths");
  if (a.size() < 2) return 0.0;
  const double ma = summarize(a).mean;
  const double mb = summarize(b).mean;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

double lag1_correlation(std::span<const double> values) {
  if (values.size() < 3) return 0.0;
  return correlation(values.first(values.size() - 1), values.subspan(1));
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_one_sample(std::span<const double> values, const ScalarFn& cdf) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "KS test needs samples");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double root = std::sqrt(n);
  return {d, kolmogorov_survival((root + 0.12 + 0.11 / root) * d)};
}

double kolmogorov_distance(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kInvalidArgument, "Kolmogorov distance needs samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double na = static_cast<double>(x.size());
  const double nb = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double histogram_tv(std::span<const double> samples, const ScalarFn& density, std::size_t bins) {
  if (samples.empty() || bins == 0) throw Error(ErrorCode::kInvalidArgument, "histogram needs samples and bins");
  std::vector<double> counts(bins, 0.0);
  for (double x : samples) {
    auto k = static_cast<std::size_t>(std::clamp(x, 0.0, 1.0) * static_cast<double>(bins));
    if (k == bins) --k;
    counts[k] += 1.0;
  }
  const double width = 1.0 / static_cast<double>(bins);
  double tv = 0.0;
  for (std::size_t k = 0; k < bins; ++k) {
    const double mass = simpson(density, static_cast<double>(k) * width, static_cast<double>(k + 1) * width, 32);
    tv += std::abs(counts[k] / static_cast<double>(samples.size()) - mass);
  }
  return 0.5 * tv;
}

}  // namespace regen
