#pragma once

// Rate-invariant comparison of covariance trajectories through transported
// square-root vector fields (TSRVFs). Trajectories are compared on their
// unit-determinant parts; the log-det channel can be added as a scalar track
// with weight w_det, forming the product manifold.

#include "spdtraj/trajectory.hpp"
#include "spdtraj/warp.hpp"

#include <utility>
#include <vector>

namespace spdtraj {

/// Finite-difference velocity of the unit-determinant part: forward
/// differences log_map(a_k, a_{k+1}) / dt, backward difference at the end.
std::vector<TangentVector> velocity_field(const CovarianceTrajectory& traj);

struct TsrvfSequence {
  UnitDetSpd base;                    ///< unit-determinant part of the first sample
  double base_log_det = 0.0;          ///< log det of the first sample
  std::vector<TangentVector> vectors; ///< all anchored at base
  std::vector<double> scalar;         ///< log-det track, zero when w_det == 0
  std::vector<double> times;
  double w_det = 0.0;

  std::size_t length() const { return vectors.size(); }
};

/// q(t_k) = transport(v_k, a_k -> a_0) / sqrt(|v_k|), transporting along the
/// piecewise-geodesic trajectory. Zero velocities map to zero vectors.
TsrvfSequence tsrvf(const CovarianceTrajectory& traj, double w_det = 0.0);

struct TrajectoryMetricOptions {
  double w_det = 0.0;
  /// Lattice size for alignment; 0 uses max(T1, T2).
  std::size_t grid = 0;
};

/// Distance before alignment: sqrt(l_x^2 + int |q1_par - q2|^2 dt), with q1
/// transported along the geodesic between the start points and the integral
/// taken by the trapezoid rule on the common grid of max(T1, T2) points.
double dist_dc(const CovarianceTrajectory& a, const CovarianceTrajectory& b, const TrajectoryMetricOptions& opts = {});

struct Alignment {
  double dq = 0.0;  ///< aligned distance attained by `warp`
  double dc = 0.0;  ///< identity-warp distance on the same lattice
  WarpingFunction warp = WarpingFunction::identity();
};

/// Aligned distance min over warps of d_c(q1, (q2 o gamma) sqrt(gamma')) by
/// dynamic programming on a grid x grid lattice. Lattice moves are coprime
/// (a, b) with a, b <= 6 and segment slopes in [1/3, 3].
Alignment align_dq(const CovarianceTrajectory& a, const CovarianceTrajectory& b, const TrajectoryMetricOptions& opts = {});

/// Lattice steps used by align_dq.
const std::vector<std::pair<int, int>>& alignment_moves();

}  // namespace spdtraj
