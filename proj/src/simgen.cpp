#include "spdtraj/simgen.hpp"

#include "spdtraj/estimation.hpp"
#include "spdtraj/parallel.hpp"
#include "spdtraj/random.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace spdtraj {

namespace {

std::uint64_t fold(std::uint64_t h, std::uint64_t v) { return hash_combine(h, v); }
std::uint64_t fold(std::uint64_t h, int v) { return hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(v))); }
std::uint64_t fold(std::uint64_t h, double v) { return hash_combine(h, std::bit_cast<std::uint64_t>(v)); }

void require_positive(int v, const char* name) {
  if (v <= 0) throw std::invalid_argument(std::string(name) + " must be positive, got " + std::to_string(v));
}

// Symmetric trace-free matrix with E||W||^2 = 1.
Eigen::MatrixXd random_direction(RandomStream& rng, Eigen::Index n) {
  const Eigen::MatrixXd g = rng.normal_matrix(n, n);
  Eigen::MatrixXd w = (g + g.transpose()) / std::sqrt(2.0);
  w.diagonal().array() -= w.trace() / static_cast<double>(n);
  return w / std::sqrt(std::max<double>(1.0, static_cast<double>(n * n + n - 2)));
}

}  // namespace

std::uint64_t config_hash(const Exp1Config& c) {
  std::uint64_t h = hash_string("exp1");
  for (int v : {c.k, c.T, c.n}) h = fold(h, v);
  return fold(h, c.seed);
}

std::uint64_t config_hash(const Exp2Config& c) {
  std::uint64_t h = hash_string("exp2");
  for (int v : {c.n, c.length, c.window, c.step, c.out_length}) h = fold(h, v);
  h = fold(h, c.roughness);
  h = fold(h, c.kernel_width);
  return fold(h, c.seed);
}

std::uint64_t config_hash(const TwoClassConfig& c) {
  std::uint64_t h = hash_string("twoclass");
  for (int v : {c.n_per_class, c.n, c.T}) h = fold(h, v);
  h = fold(h, c.separation);
  h = fold(h, c.spread);
  return fold(h, c.seed);
}

std::vector<Spd> Exp1Data::matrices() const {
  std::vector<Spd> out;
  for (const auto& s : sets) out.insert(out.end(), s.begin(), s.end());
  return out;
}

std::vector<int> Exp1Data::labels() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < sets.size(); ++i) out.insert(out.end(), sets[i].size(), static_cast<int>(i));
  return out;
}

std::vector<std::string> Exp1Data::ids() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < sets.size(); ++i)
    for (std::size_t j = 0; j < sets[i].size(); ++j) out.push_back("s" + std::to_string(i) + "_m" + std::to_string(j));
  return out;
}

Exp1Data gen_exp1(const Exp1Config& cfg, int threads) {
  require_positive(cfg.k, "k");
  require_positive(cfg.T, "T");
  require_positive(cfg.n, "n");
  const RandomStream root(hash_combine(hash_string("gen_exp1"), config_hash(cfg)));
  const Eigen::Index n = cfg.n;
  Exp1Data data;
  data.sets.resize(static_cast<std::size_t>(cfg.k));
  parallel_for(data.sets.size(), threads, [&](std::size_t i) {
    RandomStream set_rng = root.derive("set", i);
    const Eigen::MatrixXd k = set_rng.normal_matrix(n, n);
    const Eigen::MatrixXd base = k * k.transpose() + static_cast<double>(n) * Eigen::MatrixXd::Identity(n, n);
    auto& out = data.sets[i];
    out.reserve(static_cast<std::size_t>(cfg.T));
    for (int j = 0; j < cfg.T; ++j) {
      RandomStream e_rng = set_rng.derive("member", static_cast<std::uint64_t>(j));
      const Eigen::VectorXd e = e_rng.normal_matrix(n, 1);
      out.emplace_back(base + e * e.transpose());
    }
  });
  return data;
}

Exp2Data gen_exp2(const Exp2Config& cfg, int threads) {
  require_positive(cfg.n, "n");
  require_positive(cfg.length, "length");
  require_positive(cfg.window, "window");
  require_positive(cfg.step, "step");
  require_positive(cfg.out_length, "out_length");
  if (cfg.window > cfg.length) {
    throw std::invalid_argument("window (" + std::to_string(cfg.window) + ") must not exceed length (" +
                                std::to_string(cfg.length) + ")");
  }
  if (cfg.out_length < 2) throw std::invalid_argument("out_length must be at least 2");
  if (!(cfg.roughness >= 0.0)) throw std::invalid_argument("roughness must be nonnegative");
  if (!(cfg.kernel_width > 0.0)) throw std::invalid_argument("kernel_width must be positive");

  RandomStream root(hash_combine(hash_string("gen_exp2"), config_hash(cfg)));
  RandomStream series_rng = root.derive("series");
  const MultivariateTimeSeries ts(series_rng.normal_matrix(cfg.length, cfg.n));
  const WindowConfig wc{cfg.window, cfg.step};
  const CovarianceTrajectory windows = estimate_trajectory(ts, wc, threads);
  CovarianceTrajectory s = smooth_resample(windows, cfg.kernel_width, static_cast<std::size_t>(cfg.out_length));
  WarpingFunction gamma =
      random_warp(static_cast<std::size_t>(cfg.out_length), cfg.roughness, root.derive("warp").next_u64());
  CovarianceTrajectory warped = apply_warp(s, gamma);
  return {std::move(s), std::move(warped), std::move(gamma), windows.length()};
}

LabeledCollection gen_two_class(const TwoClassConfig& cfg, int threads) {
  require_positive(cfg.n_per_class, "n_per_class");
  require_positive(cfg.n, "n");
  require_positive(cfg.T, "T");
  if (!(cfg.separation >= 0.0)) throw std::invalid_argument("separation must be nonnegative");
  if (!(cfg.spread >= 0.0)) throw std::invalid_argument("spread must be nonnegative");
  const Eigen::Index n = cfg.n;
  const RandomStream root(hash_combine(hash_string("gen_two_class"), config_hash(cfg)));

  RandomStream dir_rng = root.derive("anchor-direction");
  Eigen::MatrixXd u = random_direction(dir_rng, n);
  if (u.norm() > 0.0) u /= u.norm();
  const UnitDetSpd id = UnitDetSpd::identity(n);
  const std::vector<UnitDetSpd> anchors = {id, exp_map(TangentVector(id, SymMatrix(cfg.separation * u)))};

  const std::size_t per = static_cast<std::size_t>(cfg.n_per_class);
  LabeledCollection out;
  out.trajectories.resize(2 * per);
  out.labels.resize(2 * per);
  out.ids.resize(2 * per);
  const double step = cfg.T > 1 ? cfg.spread / std::sqrt(static_cast<double>(cfg.T - 1)) : 0.0;
  parallel_for(2 * per, threads, [&](std::size_t m) {
    const int cls = static_cast<int>(m / per);
    RandomStream rng = root.derive("trajectory", m);
    std::vector<Spd> pts;
    pts.reserve(static_cast<std::size_t>(cfg.T));
    UnitDetSpd p = exp_map(TangentVector(anchors[static_cast<std::size_t>(cls)], SymMatrix(cfg.spread * random_direction(rng, n))));
    pts.push_back(p.spd());
    for (int k = 1; k < cfg.T; ++k) {
      p = exp_map(TangentVector(p, SymMatrix(step * random_direction(rng, n))));
      pts.push_back(p.spd());
    }
    out.trajectories[m] = CovarianceTrajectory(std::move(pts));
    out.labels[m] = cls;
    out.ids[m] = "c" + std::to_string(cls) + "_" + std::to_string(m % per);
  });
  return out;
}

}  // namespace spdtraj
