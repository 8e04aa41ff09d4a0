#include "spdtraj/reduction.hpp"

#include "spdtraj/errors.hpp"
#include "spdtraj/parallel.hpp"
#include "spdtraj/random.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace spdtraj {

namespace {

// Pair sums are accumulated per fixed-size chunk and the chunks added in
// order, so the result does not depend on the number of workers.
constexpr std::size_t kChunk = 32;

template <class T, class PerPair>
T chunked_sum(std::size_t count, int threads, const T& zero, PerPair&& per_pair) {
  const std::size_t chunks = (count + kChunk - 1) / kChunk;
  std::vector<T> partial(chunks, zero);
  parallel_for(chunks, threads, [&](std::size_t c) {
    T acc = zero;
    const std::size_t end = std::min(count, (c + 1) * kChunk);
    for (std::size_t k = c * kChunk; k < end; ++k) acc += per_pair(k);
    partial[c] = acc;
  });
  T total = zero;
  for (const T& p : partial) total += p;
  return total;
}

void require_consistent(const Eigen::MatrixXd& b, const PairTensor& pairs) {
  if (pairs.size() == 0) throw std::invalid_argument("pair tensor is empty");
  if (b.rows() != pairs.dim()) {
    throw DimensionMismatch("basis has " + std::to_string(b.rows()) + " rows but pair matrices are " +
                            std::to_string(pairs.dim()) + "x" + std::to_string(pairs.dim()));
  }
}

StiefelBasis log_pca_start(const std::vector<UnitDetSpd>& training, Eigen::Index d) {
  const Eigen::Index n = training.front().dim();
  Eigen::MatrixXd moment = Eigen::MatrixXd::Zero(n, n);
  for (const UnitDetSpd& p : training) {
    const Eigen::MatrixXd l = p.spd().log();
    moment += l * l;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (moment + moment.transpose()));
  return StiefelBasis::orthonormalize(es.eigenvectors().rightCols(d).rowwise().reverse());
}

struct ValueGrad {
  double value = 0.0;
  Eigen::MatrixXd grad;
  ValueGrad& operator+=(const ValueGrad& o) {
    value += o.value;
    grad += o.grad;
    return *this;
  }
};

// Objective and Euclidean gradient sharing the P_ij B products.
ValueGrad value_and_gradient(const Eigen::MatrixXd& b, const PairTensor& pairs, int threads) {
  const ValueGrad zero{0.0, Eigen::MatrixXd::Zero(b.rows(), b.cols())};
  return chunked_sum(pairs.size(), threads, zero, [&](std::size_t k) {
    const Eigen::MatrixXd pb = pairs.matrices()[k] * b;
    const Eigen::MatrixXd c = b.transpose() * pb;
    return ValueGrad{c.cwiseProduct(c.transpose()).sum(), 4.0 * pb * c};
  });
}

}  // namespace

StiefelBasis::StiefelBasis(Eigen::MatrixXd b) : b_(std::move(b)) {
  if (b_.cols() < 1 || b_.rows() < b_.cols()) {
    throw DimensionMismatch("StiefelBasis: need n >= d >= 1, got " + std::to_string(b_.rows()) + "x" +
                            std::to_string(b_.cols()));
  }
  const double err =
      (b_.transpose() * b_ - Eigen::MatrixXd::Identity(b_.cols(), b_.cols())).cwiseAbs().maxCoeff();
  if (!(err <= 1e-10)) throw std::invalid_argument("StiefelBasis: columns are not orthonormal (error " + std::to_string(err) + ")");
}

StiefelBasis StiefelBasis::orthonormalize(const Eigen::MatrixXd& a) {
  if (a.cols() < 1 || a.rows() < a.cols()) throw DimensionMismatch("orthonormalize: need n >= d >= 1");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
  const Eigen::MatrixXd& r = qr.matrixQR();
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    if (r(k, k) < 0.0) q.col(k) = -q.col(k);
  }
  return StiefelBasis(std::move(q));
}

StiefelBasis StiefelBasis::canonical(Eigen::Index n, Eigen::Index d) {
  return StiefelBasis(Eigen::MatrixXd::Identity(n, n).leftCols(d));
}

Spd pair_matrix(const UnitDetSpd& pi, const UnitDetSpd& pj) {
  if (pi.dim() != pj.dim()) throw DimensionMismatch("pair_matrix: dimension mismatch");
  const Eigen::MatrixXd m = pi.spd().inverse() * pj.matrix();
  return Spd(m * m.transpose());
}

PairTensor::PairTensor(std::vector<std::pair<std::size_t, std::size_t>> index, std::vector<Eigen::MatrixXd> matrices)
    : index_(std::move(index)), mats_(std::move(matrices)) {
  if (index_.size() != mats_.size()) throw std::invalid_argument("PairTensor: index and matrix counts differ");
  for (const auto& m : mats_) {
    if (m.rows() != m.cols() || m.rows() != mats_.front().rows()) {
      throw DimensionMismatch("PairTensor: matrices must be square of equal size");
    }
  }
}

PairTensor PairTensor::build(const std::vector<UnitDetSpd>& training, std::size_t cap, std::size_t all_pairs_limit,
                             std::uint64_t seed, int threads) {
  const std::size_t n = training.size();
  if (n < 2) throw std::invalid_argument("PairTensor::build: need at least two training matrices");
  for (const auto& p : training) {
    if (p.dim() != training.front().dim()) throw DimensionMismatch("PairTensor::build: mixed dimensions");
  }
  const std::size_t total = n * (n - 1);
  std::vector<std::size_t> chosen;
  if (n <= all_pairs_limit || cap >= total) {
    chosen.resize(total);
    for (std::size_t k = 0; k < total; ++k) chosen[k] = k;
  } else {
    // Floyd's sampling without replacement, then sorted for a fixed order.
    RandomStream rng = RandomStream(seed).derive("pair-subsample", n);
    std::unordered_set<std::size_t> picked;
    for (std::size_t j = total - cap; j < total; ++j) {
      const std::size_t t = rng.below(j + 1);
      if (!picked.insert(t).second) picked.insert(j);
    }
    chosen.assign(picked.begin(), picked.end());
    std::sort(chosen.begin(), chosen.end());
  }
  std::vector<std::pair<std::size_t, std::size_t>> index(chosen.size());
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    const std::size_t i = chosen[k] / (n - 1);
    const std::size_t r = chosen[k] % (n - 1);
    index[k] = {i, r < i ? r : r + 1};
  }
  std::vector<Eigen::MatrixXd> inv(n), sq(n);
  parallel_for(n, threads, [&](std::size_t i) {
    inv[i] = training[i].spd().inverse();
    sq[i] = training[i].matrix() * training[i].matrix();
  });
  std::vector<Eigen::MatrixXd> mats(index.size());
  parallel_for(index.size(), threads, [&](std::size_t k) {
    const auto [i, j] = index[k];
    const Eigen::MatrixXd m = inv[i] * sq[j] * inv[i];
    mats[k] = 0.5 * (m + m.transpose());
  });
  return PairTensor(std::move(index), std::move(mats));
}

double objective(const Eigen::MatrixXd& b, const PairTensor& pairs, int threads) {
  require_consistent(b, pairs);
  return chunked_sum(pairs.size(), threads, 0.0, [&](std::size_t k) {
    const Eigen::MatrixXd c = b.transpose() * (pairs.matrices()[k] * b);
    return c.cwiseProduct(c.transpose()).sum();
  });
}

double objective(const StiefelBasis& b, const PairTensor& pairs, int threads) {
  return objective(b.matrix(), pairs, threads);
}

Eigen::MatrixXd euclidean_gradient(const Eigen::MatrixXd& b, const PairTensor& pairs, int threads) {
  require_consistent(b, pairs);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(b.rows(), b.cols());
  return chunked_sum(pairs.size(), threads, zero, [&](std::size_t k) -> Eigen::MatrixXd {
    const Eigen::MatrixXd pb = pairs.matrices()[k] * b;
    return 4.0 * pb * (b.transpose() * pb);
  });
}

Eigen::MatrixXd riemannian_gradient(const Eigen::MatrixXd& b, const Eigen::MatrixXd& g) {
  const Eigen::MatrixXd btg = b.transpose() * g;
  return g - b * (0.5 * (btg + btg.transpose()));
}

ReductionModel fit_from(const StiefelBasis& start, const PairTensor& pairs, const FitOptions& opts) {
  if (opts.max_iters < 0) throw std::invalid_argument("fit: max_iters must be nonnegative");
  const int threads = opts.threads;
  Eigen::MatrixXd b = start.matrix();
  require_consistent(b, pairs);
  ValueGrad vg = value_and_gradient(b, pairs, threads);
  double f = vg.value;
  Eigen::MatrixXd xi = riemannian_gradient(b, vg.grad);
  double gn = xi.norm();

  ReductionModel model{start, {f}, 0, false, gn, pairs.size(), "max-iterations"};
  Eigen::MatrixXd prev_b, prev_xi;
  constexpr double kArmijo = 1e-4;
  for (int it = 0; it < opts.max_iters; ++it) {
    if (gn < opts.tolerance) {
      model.converged = true;
      break;
    }
    double step = 0.1 / gn;
    if (it > 0) {
      const Eigen::MatrixXd s = b - prev_b;
      const Eigen::MatrixXd y = xi - prev_xi;
      const double sy = std::abs(s.cwiseProduct(y).sum());
      if (sy > 0.0) step = s.squaredNorm() / sy;
    }
    step = std::min(step, 1.0 / gn);  // move at most unit length per step

    bool accepted = false;
    Eigen::MatrixXd trial;
    ValueGrad vg_trial;
    for (int bt = 0; bt < 60; ++bt) {
      trial = StiefelBasis::orthonormalize(b + step * xi).matrix();
      vg_trial = value_and_gradient(trial, pairs, threads);
      if (vg_trial.value >= f + kArmijo * step * gn * gn) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {  // no ascent possible at working precision
      model.stop_reason = "line-search-stalled";
      break;
    }

    prev_b = std::move(b);
    prev_xi = std::move(xi);
    b = std::move(trial);
    f = vg_trial.value;
    xi = riemannian_gradient(b, vg_trial.grad);
    gn = xi.norm();
    model.objective_trace.push_back(f);
    model.iterations = it + 1;
  }
  if (gn < opts.tolerance) {
    model.converged = true;
    model.stop_reason = "gradient-tolerance";
  }
  model.basis = StiefelBasis(b);
  model.gradient_norm = gn;
  return model;
}

ReductionModel fit(const std::vector<UnitDetSpd>& training, Eigen::Index d, const FitOptions& opts) {
  if (training.size() < 2) throw std::invalid_argument("fit: need at least two training matrices");
  const Eigen::Index n = training.front().dim();
  if (d < 1 || d >= n) {
    throw std::invalid_argument("fit: reduced dimension d=" + std::to_string(d) + " must satisfy 1 <= d < n=" +
                                std::to_string(n));
  }
  const PairTensor pairs =
      PairTensor::build(training, opts.pair_cap, opts.all_pairs_limit, opts.seed, opts.threads);
  RandomStream rng = RandomStream(opts.seed).derive("fit-init", static_cast<std::uint64_t>(d));
  auto random_start = [&](int r) {
    RandomStream s = rng.derive("restart", static_cast<std::uint64_t>(r));
    return StiefelBasis::orthonormalize(s.normal_matrix(n, d));
  };
  ReductionModel best = fit_from(opts.init == FitInit::LogPca ? log_pca_start(training, d) : random_start(0), pairs, opts);
  for (int r = 1; r <= opts.restarts; ++r) {
    ReductionModel m = fit_from(random_start(r), pairs, opts);
    if (m.objective_trace.back() > best.objective_trace.back()) best = std::move(m);
  }
  return best;
}

DetSplit project(const UnitDetSpd& p, const StiefelBasis& b) { return normalize_det(project_full(p.spd(), b)); }

Spd project_full(const Spd& p, const StiefelBasis& b) {
  if (p.dim() != b.n()) {
    throw DimensionMismatch("project: matrix is " + std::to_string(p.dim()) + "x" + std::to_string(p.dim()) +
                            " but basis expects n=" + std::to_string(b.n()));
  }
  const Eigen::MatrixXd q = b.matrix().transpose() * p.matrix() * b.matrix();
  return Spd(0.5 * (q + q.transpose()));
}

Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& q, const StiefelBasis& b) {
  if (q.rows() != b.d() || q.cols() != b.d()) throw DimensionMismatch("reconstruct: Q must be d x d");
  const Eigen::MatrixXd r = b.matrix() * q * b.matrix().transpose();
  return 0.5 * (r + r.transpose());
}

Eigen::MatrixXd pseudoinverse(const Eigen::MatrixXd& q, const StiefelBasis& b) {
  if (q.rows() != b.d() || q.cols() != b.d()) throw DimensionMismatch("pseudoinverse: Q must be d x d");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(q);
  if (!lu.isInvertible()) throw std::invalid_argument("pseudoinverse: Q is singular");
  const Eigen::MatrixXd r = b.matrix() * lu.inverse() * b.matrix().transpose();
  return 0.5 * (r + r.transpose());
}

Lemma1Residual lemma1_residual(const UnitDetSpd& pi, const UnitDetSpd& pj, const StiefelBasis& b) {
  const Eigen::MatrixXd pij = pair_matrix(pi, pj).matrix();
  const Spd qi = project_full(pi.spd(), b);
  const Spd qj = project_full(pj.spd(), b);
  const Eigen::MatrixXd hat_i_inv = pseudoinverse(qi.matrix(), b);
  const Eigen::MatrixXd hat_j = reconstruct(qj.matrix(), b);
  const Eigen::MatrixXd qi_inv = qi.inverse();
  const Eigen::MatrixXd qij = qi_inv * qj.matrix() * qj.matrix() * qi_inv;
  return {(pij - hat_i_inv * hat_j * hat_j * hat_i_inv).norm(), (pij - reconstruct(0.5 * (qij + qij.transpose()), b)).norm()};
}

CovarianceTrajectory reduce_trajectory(const CovarianceTrajectory& traj, const StiefelBasis& b) {
  std::vector<Spd> out;
  out.reserve(traj.length());
  for (const Spd& p : traj.matrices()) out.push_back(project_full(p, b));
  return CovarianceTrajectory(std::move(out));
}

Eigen::VectorXd principal_angles(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("principal_angles: shape mismatch");
  const StiefelBasis qa = StiefelBasis::orthonormalize(a);
  const StiefelBasis qb = StiefelBasis::orthonormalize(b);
  // sines are the singular values of the component of B orthogonal to A
  const Eigen::MatrixXd resid = qb.matrix() - qa.matrix() * (qa.matrix().transpose() * qb.matrix());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(resid);
  Eigen::VectorXd s = svd.singularValues();
  for (Eigen::Index k = 0; k < s.size(); ++k) s(k) = std::asin(std::min(1.0, s(k)));
  std::sort(s.data(), s.data() + s.size());
  return s;
}

}  // namespace spdtraj
