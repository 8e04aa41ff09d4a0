#include "spdtraj/trajectory_metric.hpp"

#include "spdtraj/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace spdtraj {

namespace {

struct UnitTrack {
  std::vector<UnitDetSpd> points;
  std::vector<double> log_det;
};

UnitTrack unit_track(const CovarianceTrajectory& traj) {
  UnitTrack u;
  u.points.reserve(traj.length());
  u.log_det.reserve(traj.length());
  for (const Spd& p : traj.matrices()) {
    u.points.push_back(normalize_det(p).unit);
    u.log_det.push_back(p.log_det());
  }
  return u;
}

std::vector<TangentVector> velocities(const UnitTrack& u) {
  const std::size_t n = u.points.size();
  if (n < 2) throw std::invalid_argument("velocity_field: trajectory needs at least two samples");
  const double inv_dt = static_cast<double>(n - 1);
  std::vector<TangentVector> v;
  v.reserve(n);
  for (std::size_t k = 0; k + 1 < n; ++k) v.push_back(log_map(u.points[k], u.points[k + 1]) * inv_dt);
  v.push_back(log_map(u.points[n - 1], u.points[n - 2]) * (-inv_dt));
  return v;
}

// TSRVF values flattened into columns: n*n coordinate entries followed by the
// scalar track, so inner products are plain dot products.
Eigen::MatrixXd flatten(const TsrvfSequence& q, const Eigen::MatrixXd* rotation) {
  const Eigen::Index n = q.base.dim();
  Eigen::MatrixXd out(n * n + 1, static_cast<Eigen::Index>(q.length()));
  for (std::size_t k = 0; k < q.length(); ++k) {
    Eigen::MatrixXd c = q.vectors[k].coords().matrix();
    if (rotation) c = (*rotation) * c * rotation->transpose();
    out.col(static_cast<Eigen::Index>(k)).head(n * n) = Eigen::Map<const Eigen::VectorXd>(c.data(), n * n);
    out(n * n, static_cast<Eigen::Index>(k)) = q.scalar[k];
  }
  return out;
}

struct PreparedPair {
  double lx2 = 0.0;
  Eigen::MatrixXd q1;  // transported to the start point of the second trajectory
  Eigen::MatrixXd q2;
};

PreparedPair prepare(const CovarianceTrajectory& a, const CovarianceTrajectory& b, std::size_t length,
                     double w_det) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("trajectory dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()) + ")");
  }
  if (!(w_det >= 0.0)) throw std::invalid_argument("w_det must be nonnegative");
  if (length < 2) throw std::invalid_argument("trajectories need at least two samples");
  const TsrvfSequence qa = tsrvf(a.resampled(length), w_det);
  const TsrvfSequence qb = tsrvf(b.resampled(length), w_det);
  PreparedPair p;
  const double lu = dist_unitdet(qa.base, qb.base);
  const double ld = qa.base_log_det - qb.base_log_det;
  p.lx2 = lu * lu + w_det * ld * ld;
  const Eigen::MatrixXd r = transport_rotation(qa.base, qb.base);
  p.q1 = flatten(qa, &r);
  p.q2 = flatten(qb, nullptr);
  return p;
}

// Trapezoid rule for the identity warp; shared by dist_dc and align_dq so the
// two agree bit for bit on equal lattices.
double identity_energy(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2) {
  const Eigen::Index m = q1.cols();
  const double dt = 1.0 / static_cast<double>(m - 1);
  double acc = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    const double f = (q1.col(k) - q2.col(k)).squaredNorm();
    acc += (k == 0 || k == m - 1) ? 0.5 * f : f;
  }
  return acc * dt;
}

struct Interp {
  Eigen::Index index;
  double frac;
};

// Position r of L subdivisions on a move spanning `span` lattice steps.
inline Interp interp_at(Eigen::Index start, int r, int per_step) {
  return {start + r / per_step, static_cast<double>(r % per_step) / static_cast<double>(per_step)};
}

class SegmentCost {
 public:
  SegmentCost(const Eigen::MatrixXd& q1, const Eigen::MatrixXd& q2)
      : q1_(q1), q2_(q2), g12_(q1.transpose() * q2), m_(q1.cols()) {
    n11_ = q1.colwise().squaredNorm().transpose();
    n22_ = q2.colwise().squaredNorm().transpose();
    a11_.resize(m_);
    a22_.resize(m_);
    for (Eigen::Index k = 0; k + 1 < m_; ++k) {
      a11_(k) = q1.col(k).dot(q1.col(k + 1));
      a22_(k) = q2.col(k).dot(q2.col(k + 1));
    }
    dt_ = 1.0 / static_cast<double>(m_ - 1);
  }

  // Integral of |q1(t) - sqrt(slope) q2(gamma(t))|^2 over the segment from
  // lattice node (i0, j0) advancing a steps in t and b steps in gamma, using
  // the Gram matrices.
  double fast(Eigen::Index i0, Eigen::Index j0, int a, int b) const {
    const int pieces = a * b;
    const double slope = static_cast<double>(b) / static_cast<double>(a);
    const double root = std::sqrt(slope);
    double acc = 0.0;
    for (int r = 0; r <= pieces; ++r) {
      const Interp x = interp_at(i0, r, b);
      const Interp y = interp_at(j0, r, a);
      const double f = sq1(x) - 2.0 * root * cross(x, y) + slope * sq2(y);
      acc += (r == 0 || r == pieces) ? 0.5 * f : f;
    }
    return acc * (static_cast<double>(a) * dt_ / static_cast<double>(pieces));
  }

  // Same integral evaluated from the vectors themselves.
  double exact(Eigen::Index i0, Eigen::Index j0, int a, int b) const {
    const int pieces = a * b;
    const double slope = static_cast<double>(b) / static_cast<double>(a);
    const double root = std::sqrt(slope);
    double acc = 0.0;
    for (int r = 0; r <= pieces; ++r) {
      const Interp x = interp_at(i0, r, b);
      const Interp y = interp_at(j0, r, a);
      const double f = (value(q1_, x) - root * value(q2_, y)).squaredNorm();
      acc += (r == 0 || r == pieces) ? 0.5 * f : f;
    }
    return acc * (static_cast<double>(a) * dt_ / static_cast<double>(pieces));
  }

 private:
  static Eigen::VectorXd value(const Eigen::MatrixXd& q, Interp x) {
    if (x.frac == 0.0) return q.col(x.index);
    return (1.0 - x.frac) * q.col(x.index) + x.frac * q.col(x.index + 1);
  }

  double sq1(Interp x) const { return sq(n11_, a11_, x); }
  double sq2(Interp y) const { return sq(n22_, a22_, y); }

  static double sq(const Eigen::VectorXd& nrm, const Eigen::VectorXd& adj, Interp x) {
    if (x.frac == 0.0) return nrm(x.index);
    const double u = 1.0 - x.frac;
    const double v = x.frac;
    return u * u * nrm(x.index) + 2.0 * u * v * adj(x.index) + v * v * nrm(x.index + 1);
  }

  double cross(Interp x, Interp y) const {
    const double xu = 1.0 - x.frac;
    const double yu = 1.0 - y.frac;
    double c = xu * yu * g12_(x.index, y.index);
    if (y.frac != 0.0) c += xu * y.frac * g12_(x.index, y.index + 1);
    if (x.frac != 0.0) {
      c += x.frac * yu * g12_(x.index + 1, y.index);
      if (y.frac != 0.0) c += x.frac * y.frac * g12_(x.index + 1, y.index + 1);
    }
    return c;
  }

  const Eigen::MatrixXd& q1_;
  const Eigen::MatrixXd& q2_;
  Eigen::MatrixXd g12_;
  Eigen::VectorXd n11_, n22_, a11_, a22_;
  Eigen::Index m_;
  double dt_ = 0.0;
};

}  // namespace

std::vector<TangentVector> velocity_field(const CovarianceTrajectory& traj) { return velocities(unit_track(traj)); }

TsrvfSequence tsrvf(const CovarianceTrajectory& traj, double w_det) {
  if (!(w_det >= 0.0)) throw std::invalid_argument("tsrvf: w_det must be nonnegative");
  const UnitTrack u = unit_track(traj);
  const std::vector<TangentVector> v = velocities(u);
  const std::size_t n = u.points.size();
  const double inv_dt = static_cast<double>(n - 1);
  const double root_w = std::sqrt(w_det);

  TsrvfSequence q{u.points.front(), u.log_det.front(), {}, std::vector<double>(n, 0.0), traj.times(), w_det};
  q.vectors.reserve(n);
  const Eigen::Index dim = traj.dim();
  // cumulative transport a_k -> a_0 along the trajectory
  Eigen::MatrixXd cum = Eigen::MatrixXd::Identity(dim, dim);
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) cum = cum * transport_rotation(u.points[k], u.points[k - 1]);
    const std::size_t ahead = k + 1 < n ? k + 1 : k;
    const std::size_t behind = k + 1 < n ? k : k - 1;
    const double scalar_velocity = root_w * (u.log_det[ahead] - u.log_det[behind]) * inv_dt;
    const double vn = norm(v[k]);
    const double speed = std::sqrt(vn * vn + scalar_velocity * scalar_velocity);
    if (speed == 0.0) {
      q.vectors.push_back(TangentVector::zero(q.base));
      continue;
    }
    const double scale = 1.0 / std::sqrt(speed);
    Eigen::MatrixXd c = cum * v[k].coords().matrix() * cum.transpose();
    c.diagonal().array() -= c.trace() / static_cast<double>(dim);
    q.vectors.emplace_back(q.base, SymMatrix(c * scale));
    q.scalar[k] = scalar_velocity * scale;
  }
  return q;
}

double dist_dc(const CovarianceTrajectory& a, const CovarianceTrajectory& b, const TrajectoryMetricOptions& opts) {
  const PreparedPair p = prepare(a, b, std::max(a.length(), b.length()), opts.w_det);
  return std::sqrt(p.lx2 + identity_energy(p.q1, p.q2));
}

const std::vector<std::pair<int, int>>& alignment_moves() {
  // Coprime steps up to kMaxMoveSpan with slope in [1/3, 3]. A small move set
  // quantizes gamma' coarsely, and since the TSRVF is scaled by sqrt(gamma')
  // that error does not shrink as the lattice is refined.
  static const std::vector<std::pair<int, int>> moves = [] {
    constexpr int kMaxMoveSpan = 6;
    std::vector<std::pair<int, int>> out;
    for (int a = 1; a <= kMaxMoveSpan; ++a)
      for (int b = 1; b <= kMaxMoveSpan; ++b)
        if (std::gcd(a, b) == 1 && b <= 3 * a && a <= 3 * b) out.emplace_back(a, b);
    std::stable_sort(out.begin(), out.end(), [](auto x, auto y) { return x.first + x.second < y.first + y.second; });
    return out;
  }();
  return moves;
}

Alignment align_dq(const CovarianceTrajectory& a, const CovarianceTrajectory& b, const TrajectoryMetricOptions& opts) {
  const std::size_t grid = opts.grid == 0 ? std::max(a.length(), b.length()) : opts.grid;
  if (grid < 2) throw std::invalid_argument("align_dq: grid must be at least 2");
  const PreparedPair p = prepare(a, b, grid, opts.w_det);
  const Eigen::Index m = static_cast<Eigen::Index>(grid);
  const SegmentCost cost(p.q1, p.q2);
  const auto& moves = alignment_moves();

  constexpr double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd energy = Eigen::MatrixXd::Constant(m, m, inf);
  Eigen::MatrixXi parent = Eigen::MatrixXi::Constant(m, m, -1);
  energy(0, 0) = 0.0;
  for (Eigen::Index i = 1; i < m; ++i) {
    for (Eigen::Index j = 1; j < m; ++j) {
      double best = inf;
      int arg = -1;
      for (int mv = 0; mv < static_cast<int>(moves.size()); ++mv) {
        const auto [da, db] = moves[static_cast<std::size_t>(mv)];
        const Eigen::Index i0 = i - da;
        const Eigen::Index j0 = j - db;
        if (i0 < 0 || j0 < 0 || energy(i0, j0) == inf) continue;
        const double e = energy(i0, j0) + cost.fast(i0, j0, da, db);
        if (e < best) {
          best = e;
          arg = mv;
        }
      }
      energy(i, j) = best;
      parent(i, j) = arg;
    }
  }

  std::vector<std::pair<Eigen::Index, Eigen::Index>> path{{m - 1, m - 1}};
  while (path.back().first != 0 || path.back().second != 0) {
    const auto [i, j] = path.back();
    const int mv = parent(i, j);
    if (mv < 0) throw std::runtime_error("align_dq: lattice end point unreachable");
    const auto [da, db] = moves[static_cast<std::size_t>(mv)];
    path.emplace_back(i - da, j - db);
  }
  std::reverse(path.begin(), path.end());

  double path_energy = 0.0;
  for (std::size_t s = 1; s < path.size(); ++s) {
    const auto [i0, j0] = path[s - 1];
    const auto [i1, j1] = path[s];
    path_energy += cost.exact(i0, j0, static_cast<int>(i1 - i0), static_cast<int>(j1 - j0));
  }
  const double id_energy = identity_energy(p.q1, p.q2);

  Alignment out;
  out.dc = std::sqrt(p.lx2 + id_energy);
  if (path_energy < id_energy) {
    std::vector<double> knots, values;
    const double step = 1.0 / static_cast<double>(m - 1);
    for (const auto& [i, j] : path) {
      knots.push_back(i == m - 1 ? 1.0 : static_cast<double>(i) * step);
      values.push_back(j == m - 1 ? 1.0 : static_cast<double>(j) * step);
    }
    out.dq = std::sqrt(p.lx2 + path_energy);
    out.warp = WarpingFunction(std::move(knots), std::move(values));
  } else {
    out.dq = out.dc;
    out.warp = WarpingFunction::identity(grid);
  }
  return out;
}

}  // namespace spdtraj
