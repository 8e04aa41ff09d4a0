#include "spdtraj/warp.hpp"

#include "spdtraj/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spdtraj {

WarpingFunction::WarpingFunction(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.size() != values_.size() || knots_.size() < 2) {
    throw std::invalid_argument("WarpingFunction: need at least two (t, gamma(t)) pairs of equal count");
  }
  if (knots_.front() != 0.0 || knots_.back() != 1.0) throw std::invalid_argument("WarpingFunction: knots must span [0,1]");
  if (values_.front() != 0.0 || values_.back() != 1.0) {
    throw std::invalid_argument("WarpingFunction: gamma(0) must be 0 and gamma(1) must be 1");
  }
  for (std::size_t k = 1; k < knots_.size(); ++k) {
    if (!(knots_[k] > knots_[k - 1])) throw std::invalid_argument("WarpingFunction: knots must be strictly increasing");
    if (!(values_[k] > values_[k - 1])) {
      throw std::invalid_argument("WarpingFunction: gamma must be strictly increasing (violated at knot " +
                                  std::to_string(k) + ")");
    }
  }
}

WarpingFunction WarpingFunction::identity(std::size_t knots) {
  std::vector<double> t = uniform_grid(std::max<std::size_t>(knots, 2));
  return WarpingFunction(t, t);
}

double WarpingFunction::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - knots_.begin()) - 1;
  const double s = (t - knots_[k]) / (knots_[k + 1] - knots_[k]);
  return values_[k] + s * (values_[k + 1] - values_[k]);
}

std::vector<double> WarpingFunction::operator()(const std::vector<double>& t) const {
  std::vector<double> out(t.size());
  std::transform(t.begin(), t.end(), out.begin(), [this](double x) { return (*this)(x); });
  return out;
}

WarpingFunction WarpingFunction::inverse() const { return WarpingFunction(values_, knots_); }

double warp_rms(const WarpingFunction& a, const WarpingFunction& b, std::size_t samples) {
  double acc = 0.0;
  const std::vector<double> t = uniform_grid(samples);
  for (double x : t) {
    const double d = a(x) - b(x);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(t.size()));
}

WarpingFunction random_warp(std::size_t t, double roughness, std::uint64_t seed) {
  if (t < 2) throw std::invalid_argument("random_warp: T must be at least 2");
  if (!(roughness >= 0.0)) throw std::invalid_argument("random_warp: roughness must be nonnegative");
  std::vector<double> knots = uniform_grid(t);
  if (roughness == 0.0) return WarpingFunction(knots, knots);
  RandomStream rng = RandomStream(seed).derive("random_warp", t);
  std::vector<double> inc(t - 1);
  for (double& g : inc) g = rng.gamma(1.0 / roughness, roughness);
  double total = 0.0;
  for (double g : inc) total += g;
  // Keep every increment resolvable so gamma stays strictly increasing.
  const double floor = 1e-9 * total;
  total = 0.0;
  for (double& g : inc) {
    g = std::max(g, floor);
    total += g;
  }
  std::vector<double> values(t, 0.0);
  double run = 0.0;
  for (std::size_t k = 1; k + 1 < t; ++k) {
    run += inc[k - 1];
    values[k] = run / total;
  }
  values.back() = 1.0;
  return WarpingFunction(std::move(knots), std::move(values));
}

CovarianceTrajectory apply_warp(const CovarianceTrajectory& traj, const WarpingFunction& gamma) {
  std::vector<Spd> out;
  out.reserve(traj.length());
  for (double t : traj.times()) out.push_back(traj.at(gamma(t)));
  return CovarianceTrajectory(std::move(out));
}

}  // namespace spdtraj
