#pragma once

// Pairwise distance matrices over collections, k-NN classification with
// stratified cross-validation, and plot-ready summary statistics.

#include "spdtraj/trajectory.hpp"
#include "spdtraj/trajectory_metric.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace spdtraj {

enum class TrajectoryDistance { Dc, Dq, LogEuclidean };
enum class MatrixDistance { UnitDet, Full, LogEuclidean };

std::string to_string(TrajectoryDistance m);
std::string to_string(MatrixDistance m);

struct DistanceMatrix {
  std::string metric;
  std::vector<std::string> ids;
  Eigen::MatrixXd values;
  double max_asymmetry = 0.0;  ///< largest |d(i,j) - d(j,i)| before symmetrization

  std::size_t size() const { return ids.size(); }
};

/// Per-pair diagnostics gathered while filling a d_q matrix.
struct AlignmentRecord {
  std::size_t i = 0, j = 0;
  double dc = 0.0;
  double dq = 0.0;  ///< max over both directions
  double asymmetry = 0.0;
};

struct DistanceOptions {
  TrajectoryDistance metric = TrajectoryDistance::Dq;
  TrajectoryMetricOptions trajectory;
  int threads = 1;
};

/// Fills all N(N-1)/2 pairs. d_c and d_q are evaluated in both directions and
/// stored as the max, so entries are exactly symmetric and d_q <= d_c holds
/// entrywise. When the metric is Dq and `records` is given, it receives one
/// record per pair (i < j) in row-major order.
DistanceMatrix distance_matrix(const std::vector<CovarianceTrajectory>& items, std::vector<std::string> ids,
                               const DistanceOptions& opts, std::vector<AlignmentRecord>* records = nullptr);

/// Distance matrix between single matrices (the unit-determinant metric uses
/// the unit-determinant parts).
DistanceMatrix matrix_distance_matrix(const std::vector<Spd>& items, std::vector<std::string> ids,
                                      MatrixDistance metric, double w_det = -1.0, int threads = 1);

/// sqrt of the trapezoid integral of ||log a(t) - log b(t)||^2 on a shared grid
/// of max(T1, T2) points.
double log_euclidean_trajectory_dist(const CovarianceTrajectory& a, const CovarianceTrajectory& b);

/// Majority vote among the k nearest training items by the stored distance.
/// Ties: smallest mean distance among the tied classes' neighbours, then the
/// lowest class id.
std::vector<int> knn_classify(const DistanceMatrix& d, const std::vector<int>& labels,
                              const std::vector<std::size_t>& train, const std::vector<std::size_t>& test, int k);

struct CrossValidation {
  std::vector<int> classes;           ///< sorted class ids
  Eigen::MatrixXi confusion;          ///< rows: true class, cols: predicted
  std::vector<double> class_accuracy; ///< per entry of `classes`
  double accuracy = 0.0;
  std::vector<int> predictions;       ///< per item
  std::vector<int> fold;              ///< fold index per item
};

/// Stratified k-fold: members of each class are shuffled with `seed` and dealt
/// round-robin to folds. folds == N means leave-one-out.
CrossValidation cross_validate(const DistanceMatrix& d, const std::vector<int>& labels, int folds, int k,
                               std::uint64_t seed);

double frobenius_gap(const DistanceMatrix& d, const DistanceMatrix& d_reduced);

struct BlockContrast {
  double within = 0.0;
  double between = 0.0;
  double ratio = 0.0;  ///< within / between
};

BlockContrast block_contrast(const DistanceMatrix& d, const std::vector<int>& labels);

struct ReductionHistogram {
  std::vector<double> values;  ///< (d_c - d_q) / d_c per pair with d_c > 0
  std::size_t skipped = 0;     ///< pairs with d_c == 0
};

ReductionHistogram alignment_reduction_histogram(const std::vector<AlignmentRecord>& pairs);

}  // namespace spdtraj
