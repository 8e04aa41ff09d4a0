#pragma once

#include "spdtraj/trajectory.hpp"

#include <cstdint>
#include <vector>

namespace spdtraj {

/// Piecewise-linear, strictly increasing map of [0,1] onto itself with
/// gamma(0) = 0 and gamma(1) = 1.
class WarpingFunction {
 public:
  WarpingFunction(std::vector<double> knots, std::vector<double> values);
  static WarpingFunction identity(std::size_t knots = 2);

  double operator()(double t) const;
  std::vector<double> operator()(const std::vector<double>& t) const;
  WarpingFunction inverse() const;

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
};

/// Root-mean-square difference of two warps on a uniform grid.
double warp_rms(const WarpingFunction& a, const WarpingFunction& b, std::size_t samples = 1001);

/// Normalized cumulative sum of T-1 i.i.d. Gamma(1/roughness, roughness)
/// increments on the uniform T-grid. roughness == 0 gives the identity.
WarpingFunction random_warp(std::size_t t, double roughness, std::uint64_t seed);

/// Output sample k is traj evaluated at gamma(t_k), interpolating
/// geodesically between stored samples.
CovarianceTrajectory apply_warp(const CovarianceTrajectory& traj, const WarpingFunction& gamma);

}  // namespace spdtraj
