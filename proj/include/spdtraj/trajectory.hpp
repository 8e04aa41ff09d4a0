#pragma once

#include "spdtraj/geometry.hpp"

#include <vector>

namespace spdtraj {

/// Uniformly sampled sequence of SPD matrices of a common dimension on the
/// normalized time grid t_k = k / (T - 1).
class CovarianceTrajectory {
 public:
  CovarianceTrajectory() = default;
  explicit CovarianceTrajectory(std::vector<Spd> matrices);

  Eigen::Index dim() const { return matrices_.empty() ? 0 : matrices_.front().dim(); }
  std::size_t length() const { return matrices_.size(); }
  const std::vector<Spd>& matrices() const { return matrices_; }
  const Spd& operator[](std::size_t k) const { return matrices_[k]; }
  const std::vector<double>& times() const { return times_; }

  /// Value at t in [0,1], interpolating geodesically between stored samples.
  Spd at(double t) const;

  /// Geodesic resampling onto a uniform grid of `length` points.
  CovarianceTrajectory resampled(std::size_t length) const;

 private:
  std::vector<Spd> matrices_;
  std::vector<double> times_;
};

std::vector<double> uniform_grid(std::size_t length);

}  // namespace spdtraj
