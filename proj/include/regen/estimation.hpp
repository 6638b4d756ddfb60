#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "regen/chain.hpp"
#include "regen/grid.hpp"
#include "regen/splitting.hpp"

namespace regen {

enum class KernelType { kTriangular, kEpanechnikov };

KernelType parse_kernel(const std::string& name);
std::string to_string(KernelType type);

/// Symmetric, Lipschitz, compactly supported kernel w on [-1, 1] with bandwidth h.
struct KernelSpec {
  KernelType type = KernelType::kTriangular;
  double bandwidth = 0.1;

  [[nodiscard]] double base(double u) const noexcept {
    const double a = u < 0 ? -u : u;
    if (a >= 1.0) return 0.0;
    return type == KernelType::kTriangular ? 1.0 - a : 0.75 * (1.0 - a * a);
  }
  /// w_{x,h}(y) = h^{-1} w((y - x) / h)
  [[nodiscard]] double scaled(double x, double y) const noexcept { return base((y - x) / bandwidth) / bandwidth; }
  [[nodiscard]] static constexpr double support() noexcept { return 1.0; }
  [[nodiscard]] double lipschitz() const noexcept { return type == KernelType::kTriangular ? 1.0 : 1.5; }
  [[nodiscard]] double peak() const noexcept { return type == KernelType::kTriangular ? 1.0 : 0.75; }
};

/// Indexed family of state functions, e.g. {w_{x,h} : x in grid}.
struct FunctionTable {
  std::vector<double> locations;       // label per function (x for kernel tables)
  std::vector<ScalarFn> functions;
  ScalarFn envelope;                   // optional

  [[nodiscard]] std::size_t size() const noexcept { return functions.size(); }
  [[nodiscard]] bool envelope_dominates(std::span<const double> points) const;

  static FunctionTable kernel_table(const KernelSpec& kernel, std::span<const double> locations);
  /// f_j / scale_j for every j.
  [[nodiscard]] FunctionTable scaled(std::span<const double> scale) const;
};

/// Options of the transition-density estimator.
struct TransitionEstimateOptions {
  std::optional<double> bandwidth;      // default n^{-1/6}
  std::size_t grid_points = 65;
  std::optional<double> theta;          // default 0.9 * grid minimum of the raw estimate
  SmallSet small_set = SmallSet::interval(0.0, 1.0);
  ScalarFn nu_density;                  // default uniform on [0, 1]
  double cap = 50.0;                    // R
};

/// Clipped estimate p_hat on a grid over [0,1]^2 (bilinear in between).
/// Invariants: p_hat >= theta nu'(y) on S x S, p_hat <= R, p_hat > 0.
class TransitionDensityEstimate {
 public:
  TransitionDensityEstimate(GridDensity values, double bandwidth, double theta, SmallSet small_set, ScalarFn nu,
                            double cap, std::size_t n_source, std::string boundary_correction);

  /// Wrap the grid density of a model (p_hat = p), e.g. to run the
  /// approximate-split code path against the truth.
  static TransitionDensityEstimate from_model(const MarkovModel& model);

  double operator()(double x, double y) const noexcept { return values_(x, y); }
  [[nodiscard]] const GridDensity& grid() const noexcept { return values_; }
  [[nodiscard]] double bandwidth() const noexcept { return bandwidth_; }
  [[nodiscard]] double theta() const noexcept { return theta_; }
  [[nodiscard]] const SmallSet& small_set() const noexcept { return small_set_; }
  [[nodiscard]] double nu_density(double y) const { return nu_(y); }
  [[nodiscard]] double cap() const noexcept { return cap_; }
  [[nodiscard]] std::size_t n_source() const noexcept { return n_source_; }
  [[nodiscard]] const std::string& boundary_correction() const noexcept { return boundary_correction_; }

  /// True when all clipping invariants hold on the grid.
  [[nodiscard]] bool satisfies_invariants() const;

 private:
  GridDensity values_;
  double bandwidth_;
  double theta_;
  SmallSet small_set_;
  ScalarFn nu_;
  double cap_;
  std::size_t n_source_;
  std::string boundary_correction_;
};

/// Nadaraya-Watson ratio of the reflected pair KDE of (X_t, X_{t+1}) over the
/// reflected marginal KDE of X_t (product triangular kernel), clipped below by
/// theta nu' on S rows and above by R.
TransitionDensityEstimate estimate_transition_density(const Trajectory& traj,
                                                      const TransitionEstimateOptions& options = {});

/// Sum of f over the block values.
double block_sum(const ScalarFn& f, std::span<const double> block);

/// n^{-1} sum_i f(X_i)
double empirical_mean(std::span<const double> samples, const ScalarFn& f);

/// n^{-1} sum_i w_{x,h}(X_i)
double kde(std::span<const double> samples, const KernelSpec& kernel, double x);
std::vector<double> kde(std::span<const double> samples, const KernelSpec& kernel, std::span<const double> points);

/// Block sums of every table function: column i holds (f_j-check(B_i))_j.
/// Also returns the block lengths.
struct BlockSums {
  Eigen::MatrixXd sums;          // G x k
  std::vector<double> lengths;   // k
  std::size_t sample_count = 0;  // n of the underlying trajectory
};
BlockSums block_sums(const BlockDecomposition& decomp, const FunctionTable& table);

/// Centering applied to block sums: f-check(B) - l(B) center_f. The caller
/// must choose between none, the sample mean pi_hat f and the true pi f.
class Centering {
 public:
  static Centering none() { return Centering{}; }
  static Centering at(std::vector<double> centers) {
    Centering c;
    c.centers_ = std::move(centers);
    c.active_ = true;
    return c;
  }
  [[nodiscard]] bool active() const noexcept { return active_; }
  [[nodiscard]] const std::vector<double>& centers() const noexcept { return centers_; }

 private:
  std::vector<double> centers_;
  bool active_ = false;
};

/// sums(j, i) - lengths[i] * center_j (no-op without centering).
Eigen::MatrixXd centered_block_sums(const BlockSums& sums, const Centering& centering);

/// Gamma_hat(f, g) = n^{-1} sum_i f-check(B_i) g-check(B_i), over centered sums.
Eigen::MatrixXd empirical_covariance(const BlockDecomposition& decomp, const FunctionTable& table,
                                     const Centering& centering);
/// Same, from precomputed centered sums (G x k).
Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& centered, std::size_t n);

/// max_{j,k} |oracle(j,k) / beta - Gamma_hat(j,k)|, where oracle is the block
/// second-moment matrix E[f-check(B_1) g-check(B_1)].
double delta_diagnostic(const BlockDecomposition& decomp, const FunctionTable& table, const Eigen::MatrixXd& oracle_cov,
                        double beta, const Centering& centering);

}  // namespace regen
