#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "regen/bootstrap.hpp"
#include "regen/estimation.hpp"
#include "regen/splitting.hpp"

namespace regen {

struct BandConfig {
  std::vector<double> grid;               // evaluation points, strictly inside (0, 1)
  KernelType kernel = KernelType::kTriangular;
  double alpha = 0.1;
  std::size_t reps = 1000;                // bootstrap replications B
  double bandwidth_exponent = 0.22;       // h = n^{-a}
  std::optional<double> bandwidth;        // overrides the rule when set
  double sigma_floor = 1e-8;

  [[nodiscard]] double bandwidth_for(std::size_t n) const;
};

/// Evenly spaced evaluation grid on [lo, hi] with spacing at most `max_spacing`.
std::vector<double> band_grid(double lo, double hi, double max_spacing);

/// Throws kInvalidArgument unless 0 < alpha < 1 and every grid point keeps a
/// margin of at least one kernel support (h) from 0 and 1.
void validate_band_config(const BandConfig& config, double bandwidth);

struct ConfidenceBand {
  std::vector<double> grid;
  std::vector<double> estimate;   // pi_hat w_{x,h}
  std::vector<double> sigma_hat;
  std::vector<double> lower;
  std::vector<double> upper;
  double c_hat = 0.0;
  double alpha = 0.0;
  double bandwidth = 0.0;
  std::size_t n = 0;
  std::size_t block_count = 0;
  std::optional<double> beta_hat;
  SupStatistic sup;               // abs-sup draws over the studentized class

  [[nodiscard]] double half_width(std::size_t j) const;
};

/// sigma_hat_n(x) = {n^{-1} sum_i (w-check_{x,h}(B_i) - l(B_i) pi_hat w_{x,h})^2}^{1/2}.
/// Throws kDegenerateStudentizer when the value falls below sigma_floor.
double sigma_hat(const BlockDecomposition& decomp, const KernelSpec& kernel, double x, double kde_value,
                 double sigma_floor = 1e-8);

/// Approximate split, blocks, KDE and studentizer, bootstrap over the
/// studentized kernel class, abs-sup quantile, then the band.
ConfidenceBand build_band(const Trajectory& traj, const TransitionDensityEstimate& p_hat, const BandConfig& config,
                          std::uint64_t seed);

/// Band from an existing block decomposition (the split step already done).
ConfidenceBand build_band(const BlockDecomposition& decomp, const BandConfig& config, std::uint64_t seed);

/// Same band with a different alpha on the same bootstrap draws.
ConfidenceBand with_alpha(const ConfidenceBand& band, double alpha);

/// lower(x) <= truth(x) <= upper(x) for every grid point.
bool coverage_check(const ConfidenceBand& band, std::span<const double> truth);

/// sup_x sqrt(n) |pi_hat w_{x,h} - truth(x)| / sigma_hat(x); the band covers
/// iff this is <= c_hat.
double studentized_deviation(const ConfidenceBand& band, std::span<const double> truth);

}  // namespace regen
