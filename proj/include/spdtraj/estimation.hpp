#pragma once

#include "spdtraj/trajectory.hpp"

#include <Eigen/Dense>

#include <vector>

namespace spdtraj {

/// Rows are time samples, columns are channels.
class MultivariateTimeSeries {
 public:
  MultivariateTimeSeries() = default;
  explicit MultivariateTimeSeries(Eigen::MatrixXd values, double sampling_step = 1.0);

  Eigen::Index n_channels() const { return values_.cols(); }
  Eigen::Index n_times() const { return values_.rows(); }
  const Eigen::MatrixXd& values() const { return values_; }
  double sampling_step() const { return sampling_step_; }

 private:
  Eigen::MatrixXd values_;
  double sampling_step_ = 1.0;
};

struct WindowConfig {
  int window_size = 0;
  int step_size = 1;
};

/// Number of windows produced for a series of length n_times; throws when the
/// configuration does not fit.
std::size_t window_count(Eigen::Index n_times, const WindowConfig& cfg);

struct ShrinkageDiagnostics {
  double rho1 = 0.0;       ///< weight of the identity
  double rho2 = 0.0;       ///< weight of the sample covariance
  double intensity = 0.0;  ///< shrinkage intensity in [0,1]
  /// Zero total variance, or a sample covariance so ill-conditioned that the
  /// estimate fell back to the scaled-identity target.
  bool degenerate = false;
};

struct ShrinkageEstimate {
  Spd covariance;
  ShrinkageDiagnostics diagnostics;
};

/// Ledoit-Wolf estimate rho1 I + rho2 S of a window (rows = samples) after
/// per-channel mean removal.
ShrinkageEstimate ledoit_wolf(const Eigen::Ref<const Eigen::MatrixXd>& window);

/// One shrinkage covariance per sliding window; windows may be estimated in
/// parallel, output order is fixed.
CovarianceTrajectory estimate_trajectory(const MultivariateTimeSeries& ts, const WindowConfig& cfg, int threads = 1);

/// Gaussian kernel smoothing of matrix-log coordinates evaluated at t_out
/// uniform points, mapped back through the matrix exponential. kernel_width is
/// measured in input grid steps.
CovarianceTrajectory smooth_resample(const CovarianceTrajectory& traj, double kernel_width, std::size_t t_out);

/// (1/n) log det at each time point.
std::vector<double> logdet_curve(const CovarianceTrajectory& traj);

struct PcaProjection {
  MultivariateTimeSeries reduced;
  Eigen::MatrixXd components;  ///< n_channels x d, orthonormal columns
  Eigen::VectorXd mean;        ///< channel means removed before projection
  Eigen::VectorXd variances;   ///< all eigenvalues of the channel covariance, descending
  double retained_variance = 0.0;

  /// Maps reduced coordinates back to channel space.
  Eigen::MatrixXd reconstruct() const;
};

PcaProjection pca_reduce_timeseries(const MultivariateTimeSeries& ts, int d);

}  // namespace spdtraj
