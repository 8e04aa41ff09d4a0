#include "spdtraj/trajectory.hpp"

#include "spdtraj/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spdtraj {

std::vector<double> uniform_grid(std::size_t length) {
  std::vector<double> t(length, 0.0);
  if (length < 2) return t;
  const double step = 1.0 / static_cast<double>(length - 1);
  for (std::size_t k = 0; k < length; ++k) t[k] = static_cast<double>(k) * step;
  t.back() = 1.0;
  return t;
}

CovarianceTrajectory::CovarianceTrajectory(std::vector<Spd> matrices) : matrices_(std::move(matrices)) {
  if (matrices_.empty()) throw std::invalid_argument("CovarianceTrajectory: empty trajectory");
  for (const Spd& p : matrices_) {
    if (p.dim() != matrices_.front().dim()) {
      throw DimensionMismatch("CovarianceTrajectory: matrices of unequal dimension");
    }
  }
  times_ = uniform_grid(matrices_.size());
}

Spd CovarianceTrajectory::at(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("CovarianceTrajectory::at: t outside [0,1]");
  const std::size_t n = matrices_.size();
  if (n == 1) return matrices_.front();
  const double pos = t * static_cast<double>(n - 1);
  const double nearest = std::round(pos);
  if (std::abs(pos - nearest) <= 1e-12 * static_cast<double>(n)) return matrices_[static_cast<std::size_t>(nearest)];
  std::size_t k = static_cast<std::size_t>(std::floor(pos));
  if (k >= n - 1) k = n - 2;
  const double s = std::clamp(pos - static_cast<double>(k), 0.0, 1.0);
  // Exact grid hits return the stored sample.
  if (s == 0.0) return matrices_[k];
  if (s == 1.0) return matrices_[k + 1];
  return interpolate(matrices_[k], matrices_[k + 1], s);
}

CovarianceTrajectory CovarianceTrajectory::resampled(std::size_t length) const {
  if (length == 0) throw std::invalid_argument("resampled: length must be positive");
  if (length == matrices_.size()) return *this;
  std::vector<Spd> out;
  out.reserve(length);
  for (double t : uniform_grid(length)) out.push_back(at(t));
  return CovarianceTrajectory(std::move(out));
}

}  // namespace spdtraj
