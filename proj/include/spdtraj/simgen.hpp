#pragma once

// Seeded generators for the two simulation experiments and a labelled
// two-class trajectory set. Every generator is a pure function of its config;
// the generator name and a hash of the config salt the random stream.

#include "spdtraj/trajectory.hpp"
#include "spdtraj/warp.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace spdtraj {

struct Exp1Config {
  int k = 10;   ///< number of sets
  int T = 20;   ///< matrices per set
  int n = 100;  ///< dimension
  std::uint64_t seed = 0;
};

struct Exp1Data {
  std::vector<std::vector<Spd>> sets;

  std::vector<Spd> matrices() const;  ///< all sets concatenated
  std::vector<int> labels() const;    ///< set index per matrix
  std::vector<std::string> ids() const;
};

/// P = K_i K_i^T + n I + e e^T with K_i (n x n, standard normal) shared by set
/// i and a fresh standard normal e per matrix.
Exp1Data gen_exp1(const Exp1Config& cfg, int threads = 1);

struct Exp2Config {
  int n = 100;
  int length = 300;
  int window = 80;
  int step = 10;
  int out_length = 20;
  double roughness = 0.1;
  double kernel_width = 1.5;  ///< in window-grid steps
  std::uint64_t seed = 0;
};

struct Exp2Data {
  CovarianceTrajectory original;  ///< S
  CovarianceTrajectory warped;    ///< S o gamma
  WarpingFunction gamma;
  std::size_t window_count = 0;   ///< sliding windows before resampling
};

Exp2Data gen_exp2(const Exp2Config& cfg, int threads = 1);

struct TwoClassConfig {
  int n_per_class = 40;
  int n = 4;
  int T = 10;
  double separation = 1.0;  ///< geodesic distance between the class anchors
  double spread = 0.1;      ///< typical distance of trajectory points from their anchor
  std::uint64_t seed = 0;
};

struct LabeledCollection {
  std::vector<CovarianceTrajectory> trajectories;
  std::vector<int> labels;
  std::vector<std::string> ids;
};

/// Unit-determinant random walks around two anchors at the given separation.
LabeledCollection gen_two_class(const TwoClassConfig& cfg, int threads = 1);

std::uint64_t config_hash(const Exp1Config& cfg);
std::uint64_t config_hash(const Exp2Config& cfg);
std::uint64_t config_hash(const TwoClassConfig& cfg);

}  // namespace spdtraj
