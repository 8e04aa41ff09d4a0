#include "spdtraj/estimation.hpp"

#include "spdtraj/errors.hpp"
#include "spdtraj/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

namespace spdtraj {

namespace {
// Variance floor used when a window has no variance at all.
constexpr double kDegenerateVariance = 1e-10;
// Condition bound below which the shrinkage estimate falls back to its target.
constexpr double kMinRelativeEigenvalue = 1e-10;
}  // namespace

MultivariateTimeSeries::MultivariateTimeSeries(Eigen::MatrixXd values, double sampling_step)
    : values_(std::move(values)), sampling_step_(sampling_step) {
  if (values_.cols() < 1) throw std::invalid_argument("time series needs at least one channel");
  if (values_.rows() < 2) throw std::invalid_argument("time series needs at least two samples");
  if (!values_.allFinite()) throw std::invalid_argument("time series contains NaN or Inf");
  if (!(sampling_step_ > 0.0)) throw std::invalid_argument("sampling step must be positive");
}

std::size_t window_count(Eigen::Index n_times, const WindowConfig& cfg) {
  if (cfg.window_size < 2) throw std::invalid_argument("window_size must be at least 2");
  if (cfg.step_size < 1) throw std::invalid_argument("step_size must be at least 1");
  if (cfg.window_size > n_times) {
    throw std::invalid_argument("window_size (" + std::to_string(cfg.window_size) + ") exceeds series length (" +
                                std::to_string(n_times) + ")");
  }
  return static_cast<std::size_t>((n_times - cfg.window_size) / cfg.step_size) + 1;
}

ShrinkageEstimate ledoit_wolf(const Eigen::Ref<const Eigen::MatrixXd>& window) {
  const Eigen::Index m = window.rows();
  const Eigen::Index p = window.cols();
  if (m < 2) throw std::invalid_argument("ledoit_wolf: window needs at least two samples");
  if (!window.allFinite()) throw std::invalid_argument("ledoit_wolf: window contains NaN or Inf");

  const Eigen::RowVectorXd mean = window.colwise().mean();
  const Eigen::MatrixXd x = window.rowwise() - mean;
  const double dm = static_cast<double>(m);
  const double dp = static_cast<double>(p);
  Eigen::MatrixXd s = (x.transpose() * x) / dm;
  s = 0.5 * (s + s.transpose());

  // Norms below are the scaled Frobenius norm ||A||^2 = tr(A A^T) / p.
  const double mu = s.trace() / dp;
  ShrinkageDiagnostics diag;
  if (!(mu > 0.0)) {
    diag.rho1 = kDegenerateVariance;
    diag.intensity = 1.0;
    diag.degenerate = true;
    return {Spd::from_eigen(Eigen::VectorXd::Constant(p, kDegenerateVariance), Eigen::MatrixXd::Identity(p, p)),
            diag};
  }

  Eigen::MatrixXd target_gap = s;
  target_gap.diagonal().array() -= mu;
  const double delta2 = target_gap.squaredNorm() / dp;

  // beta_bar^2 = (1/m^2) sum_k ||x_k x_k^T - S||^2
  //            = (1/m^2) sum_k ||x_k||^4 / p - ||S||^2 / m
  const Eigen::VectorXd row_sq = x.rowwise().squaredNorm();
  const double beta_bar2 =
      std::max(0.0, (row_sq.array().square().sum() / dp) / (dm * dm) - (s.squaredNorm() / dp) / dm);
  const double beta2 = std::min(beta_bar2, delta2);
  const double intensity = delta2 > 0.0 ? beta2 / delta2 : 1.0;

  diag.intensity = intensity;
  diag.rho1 = intensity * mu;
  diag.rho2 = 1.0 - intensity;
  Eigen::MatrixXd sigma = diag.rho2 * s;
  sigma.diagonal().array() += diag.rho1;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
  if (es.info() != Eigen::Success) throw std::runtime_error("ledoit_wolf: eigendecomposition failed");
  if (es.eigenvalues()(0) < std::max(kMinRelativeEigenvalue * mu, kPdEpsilon)) {
    // A rank-deficient S with (numerically) zero estimated shrinkage, e.g. two
    // samples after centering. Use the target itself.
    diag.intensity = 1.0;
    diag.rho1 = mu;
    diag.rho2 = 0.0;
    diag.degenerate = true;
    return {Spd::from_eigen(Eigen::VectorXd::Constant(p, mu), Eigen::MatrixXd::Identity(p, p)), diag};
  }
  return {Spd::from_eigen(es.eigenvalues(), es.eigenvectors()), diag};
}

CovarianceTrajectory estimate_trajectory(const MultivariateTimeSeries& ts, const WindowConfig& cfg, int threads) {
  const std::size_t count = window_count(ts.n_times(), cfg);
  std::vector<std::optional<Spd>> slots(count);
  parallel_for(count, threads, [&](std::size_t k) {
    const Eigen::Index start = static_cast<Eigen::Index>(k) * cfg.step_size;
    slots[k] = ledoit_wolf(ts.values().middleRows(start, cfg.window_size)).covariance;
  });
  std::vector<Spd> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return CovarianceTrajectory(std::move(out));
}

CovarianceTrajectory smooth_resample(const CovarianceTrajectory& traj, double kernel_width, std::size_t t_out) {
  if (!(kernel_width > 0.0)) throw std::invalid_argument("smooth_resample: kernel_width must be positive");
  if (t_out == 0) throw std::invalid_argument("smooth_resample: output length must be positive");
  const std::size_t t_in = traj.length();
  std::vector<Eigen::MatrixXd> logs;
  logs.reserve(t_in);
  for (const Spd& p : traj.matrices()) logs.push_back(p.log());

  const std::vector<double>& t = traj.times();
  const double step = t_in > 1 ? 1.0 / static_cast<double>(t_in - 1) : 1.0;
  const double h = kernel_width * step;
  // Smooth on the input grid, then resample geodesically.
  std::vector<Spd> out;
  out.reserve(t_in);
  std::vector<double> expo(t_in);
  for (double u : t) {
    // Weights exp(-(u - t_k)^2 / 2h^2), normalized with the largest exponent
    // factored out so narrow kernels do not underflow.
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < t_in; ++k) {
      const double z = (u - t[k]) / h;
      expo[k] = -0.5 * z * z;
      best = std::max(best, expo[k]);
    }
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(traj.dim(), traj.dim());
    double total = 0.0;
    for (std::size_t k = 0; k < t_in; ++k) {
      const double w = std::exp(expo[k] - best);
      if (w == 0.0) continue;
      acc += w * logs[k];
      total += w;
    }
    out.push_back(sym_exp(SymMatrix(acc / total)));
  }
  CovarianceTrajectory smoothed(std::move(out));
  return t_out == t_in ? smoothed : smoothed.resampled(t_out);
}

std::vector<double> logdet_curve(const CovarianceTrajectory& traj) {
  std::vector<double> out;
  out.reserve(traj.length());
  const double n = static_cast<double>(traj.dim());
  for (const Spd& p : traj.matrices()) out.push_back(p.log_det() / n);
  return out;
}

Eigen::MatrixXd PcaProjection::reconstruct() const {
  Eigen::MatrixXd y = reduced.values() * components.transpose();
  return y.rowwise() + mean.transpose();
}

PcaProjection pca_reduce_timeseries(const MultivariateTimeSeries& ts, int d) {
  const Eigen::Index p = ts.n_channels();
  if (d < 1) throw std::invalid_argument("pca_reduce_timeseries: d must be positive");
  if (d > p) {
    throw std::invalid_argument("pca_reduce_timeseries: d (" + std::to_string(d) + ") exceeds channel count (" +
                                std::to_string(p) + ")");
  }
  PcaProjection out;
  out.mean = ts.values().colwise().mean().transpose();
  const Eigen::MatrixXd x = ts.values().rowwise() - out.mean.transpose();
  Eigen::MatrixXd c = (x.transpose() * x) / static_cast<double>(ts.n_times());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (c + c.transpose()));
  if (es.info() != Eigen::Success) throw std::runtime_error("pca_reduce_timeseries: eigendecomposition failed");
  out.variances = es.eigenvalues().reverse();
  out.components = es.eigenvectors().rowwise().reverse().leftCols(d);
  const double total = out.variances.sum();
  out.retained_variance = total > 0.0 ? out.variances.head(d).sum() / total : 1.0;
  out.reduced = MultivariateTimeSeries(x * out.components, ts.sampling_step());
  return out;
}

}  // namespace spdtraj
