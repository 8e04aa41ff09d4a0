#pragma once

// Dimension reduction of unit-determinant SPD matrices: find B on the
// Stiefel manifold maximizing sum_ij tr(B^T P_ij B B^T P_ij B) with
// P_ij = P_i^-1 P_j^2 P_i^-1, then map P -> B^T P B.

#include "spdtraj/geometry.hpp"
#include "spdtraj/trajectory.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace spdtraj {

/// n x d matrix with orthonormal columns (B^T B = I_d to 1e-10).
class StiefelBasis {
 public:
  explicit StiefelBasis(Eigen::MatrixXd b);

  /// Q factor of a thin QR with a nonnegative diagonal in R; deterministic.
  static StiefelBasis orthonormalize(const Eigen::MatrixXd& a);
  /// First d columns of the n x n identity.
  static StiefelBasis canonical(Eigen::Index n, Eigen::Index d);

  Eigen::Index n() const { return b_.rows(); }
  Eigen::Index d() const { return b_.cols(); }
  const Eigen::MatrixXd& matrix() const { return b_; }

 private:
  Eigen::MatrixXd b_;
};

Spd pair_matrix(const UnitDetSpd& pi, const UnitDetSpd& pj);

/// Pair matrices over a training set.
class PairTensor {
 public:
  PairTensor(std::vector<std::pair<std::size_t, std::size_t>> index, std::vector<Eigen::MatrixXd> matrices);

  /// All ordered pairs i != j when the set has at most `all_pairs_limit`
  /// members, otherwise `cap` ordered pairs drawn uniformly without replacement.
  static PairTensor build(const std::vector<UnitDetSpd>& training, std::size_t cap = 2048,
                          std::size_t all_pairs_limit = 64, std::uint64_t seed = 0, int threads = 1);

  std::size_t size() const { return mats_.size(); }
  Eigen::Index dim() const { return mats_.empty() ? 0 : mats_.front().rows(); }
  const std::vector<Eigen::MatrixXd>& matrices() const { return mats_; }
  const std::vector<std::pair<std::size_t, std::size_t>>& index() const { return index_; }

 private:
  std::vector<std::pair<std::size_t, std::size_t>> index_;
  std::vector<Eigen::MatrixXd> mats_;
};

double objective(const StiefelBasis& b, const PairTensor& pairs, int threads = 1);
double objective(const Eigen::MatrixXd& b, const PairTensor& pairs, int threads = 1);

/// sum_ij 4 P_ij B (B^T P_ij B).
Eigen::MatrixXd euclidean_gradient(const Eigen::MatrixXd& b, const PairTensor& pairs, int threads = 1);

/// Projection of an ambient gradient onto the tangent space at B:
/// G - B sym(B^T G).
Eigen::MatrixXd riemannian_gradient(const Eigen::MatrixXd& b, const Eigen::MatrixXd& g);

enum class FitInit { LogPca, Random };

struct FitOptions {
  int max_iters = 500;
  double tolerance = 1e-6;  ///< on the Riemannian gradient norm
  int restarts = 0;         ///< extra random starts; the best objective wins
  std::size_t pair_cap = 2048;
  std::size_t all_pairs_limit = 64;
  std::uint64_t seed = 0;
  FitInit init = FitInit::LogPca;
  int threads = 1;
};

struct ReductionModel {
  StiefelBasis basis;
  std::vector<double> objective_trace;  ///< objective after every accepted step, starting at B0
  int iterations = 0;
  bool converged = false;
  double gradient_norm = 0.0;
  std::size_t pair_count = 0;
  std::string stop_reason;  ///< "gradient-tolerance", "max-iterations" or "line-search-stalled"
};

/// Riemannian gradient ascent with QR retraction, Barzilai-Borwein trial
/// steps and Armijo backtracking.
ReductionModel fit(const std::vector<UnitDetSpd>& training, Eigen::Index d, const FitOptions& opts = {});

/// Ascent from a given starting basis on precomputed pairs.
ReductionModel fit_from(const StiefelBasis& start, const PairTensor& pairs, const FitOptions& opts = {});

/// Q = B^T P B, split into its unit-determinant part and log-det channel.
DetSplit project(const UnitDetSpd& p, const StiefelBasis& b);
/// B^T P B for a full SPD matrix.
Spd project_full(const Spd& p, const StiefelBasis& b);

/// B Q B^T.
Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& q, const StiefelBasis& b);
/// B Q^-1 B^T, the Moore-Penrose inverse of B Q B^T.
Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& q, const StiefelBasis& b);

struct Lemma1Residual {
  double via_pseudoinverse = 0.0;  ///< ||P_ij - Phat_i^- Phat_j^2 Phat_i^-||_F
  double via_projection = 0.0;     ///< ||P_ij - B Q_ij B^T||_F
};

Lemma1Residual lemma1_residual(const UnitDetSpd& pi, const UnitDetSpd& pj, const StiefelBasis& b);

/// Pointwise B^T P B on full matrices; keeps length and grid.
CovarianceTrajectory reduce_trajectory(const CovarianceTrajectory& traj, const StiefelBasis& b);
inline CovarianceTrajectory reduce_trajectory(const CovarianceTrajectory& traj, const ReductionModel& model) {
  return reduce_trajectory(traj, model.basis);
}

/// Principal angles (radians, ascending) between the column spaces of two bases.
Eigen::VectorXd principal_angles(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace spdtraj
