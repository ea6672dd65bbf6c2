#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hybridopt/space.hpp"

namespace hybridopt {

struct GpHyperConfig {
  /// Candidate length scales (unit-cube scale); the one with the highest log
  /// marginal likelihood wins, ties going to the earlier entry.
  std::vector<double> length_scale_grid{0.05, 0.1, 0.2, 0.4, 0.8, 1.6};
  /// Noise variance in standardized target units.
  double noise_variance = 1e-6;
  /// Largest diagonal term tried when the factorization fails; each retry
  /// multiplies the diagonal term by 10.
  double max_jitter = 1e-2;
};

struct GpPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Gaussian process with an isotropic squared-exponential kernel over
/// unit-cube inputs and standardized targets (signal variance 1).
class GpModel {
 public:
  GpModel() = default;

  /// Fits on `points` (rows in [0,1]^d) and raw `values`. Throws Error when
  /// the kernel matrix cannot be factorized even at the maximum jitter.
  static GpModel fit(const std::vector<Point>& points, std::span<const double> values,
                     const GpHyperConfig& config = {});

  GpPrediction predict(std::span<const double> x) const;
  /// Row-wise predictions for a candidate matrix (one point per row).
  std::vector<GpPrediction> predict(const Eigen::MatrixXd& candidates) const;

  std::size_t size() const { return static_cast<std::size_t>(inputs_.rows()); }
  double length_scale() const { return length_scale_; }
  /// Kernel variance in raw target units.
  double signal_variance() const { return target_scale_ * target_scale_; }
  /// Diagonal term actually used (noise plus any jitter), standardized units.
  double diagonal_noise() const { return diagonal_noise_; }
  double target_mean() const { return target_mean_; }
  double target_scale() const { return target_scale_; }
  double log_marginal_likelihood() const { return log_marginal_likelihood_; }
  const Eigen::MatrixXd& cholesky_factor() const { return chol_; }
  /// K + diagonal_noise * I, the matrix the factor reconstructs.
  Eigen::MatrixXd kernel_matrix() const;

 private:
  Eigen::MatrixXd inputs_;
  Eigen::VectorXd alpha_;
  Eigen::MatrixXd chol_;
  double length_scale_ = 0.2;
  double diagonal_noise_ = 1e-6;
  double target_mean_ = 0.0;
  double target_scale_ = 1.0;
  double log_marginal_likelihood_ = 0.0;
};

inline GpModel gp_fit(const std::vector<Point>& points, std::span<const double> values,
                      const GpHyperConfig& config = {}) {
  return GpModel::fit(points, values, config);
}

inline GpPrediction gp_predict(const GpModel& model, std::span<const double> x) { return model.predict(x); }

double normal_pdf(double z);
double normal_cdf(double z);

/// Expected improvement over `best` for maximization.
double expected_improvement(double mean, double variance, double best);

}  // namespace hybridopt
