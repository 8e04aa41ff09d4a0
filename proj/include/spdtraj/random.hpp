#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string_view>

namespace spdtraj {

/// Counter-based random stream: the i-th draw is a pure function of (key, i),
/// so streams split by label and index give the same values regardless of how
/// work is scheduled across threads.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key = 0) : key_(key) {}

  /// Child stream salted by a tag and an index.
  RandomStream derive(std::string_view tag, std::uint64_t index = 0) const;

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  double normal();
  /// Gamma(shape, scale), Marsaglia-Tsang.
  double gamma(double shape, double scale);
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_string(std::string_view s);
inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) { return mix64(a ^ mix64(b + 0x9e3779b97f4a7c15ULL)); }

}  // namespace spdtraj
