#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "regen/grid.hpp"

namespace regen {

struct Summary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double standard_error = 0.0;
  std::size_t count = 0;
};

Summary summarize(std::span<const double> values);

/// Median (average of the two middle values for even counts).
double median(std::vector<double> values);

/// Lag-1 sample autocorrelation; 0 for constant or too-short sequences.
double lag1_correlation(std::span<const double> values);

/// Pearson correlation of two equally long sequences.
double correlation(std::span<const double> a, std::span<const double> b);

struct KsResult {
  double statistic = 0.0;
  double pvalue = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF, asymptotic
/// p-value with the Stephens small-sample correction.
KsResult ks_one_sample(std::span<const double> values, const ScalarFn& cdf);

/// sup_t |F_a(t) - F_b(t)| between two empirical CDFs.
double kolmogorov_distance(std::span<const double> a, std::span<const double> b);

/// Survival function of the Kolmogorov distribution, P(K > lambda).
double kolmogorov_survival(double lambda);

/// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::size_t successes, std::size_t trials, double z = 1.959963984540054);

/// Total-variation distance between the histogram of `samples` over [0,1]
/// (`bins` equal bins) and the bin masses of `density` (Simpson per bin).
double histogram_tv(std::span<const double> samples, const ScalarFn& density, std::size_t bins);

}  // namespace regen
