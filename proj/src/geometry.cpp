#include "spdtraj/geometry.hpp"

#include "spdtraj/errors.hpp"

#include <cmath>

namespace spdtraj {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* where) {
  if (a != b) {
    throw DimensionMismatch(std::string(where) + ": dimension mismatch (" + std::to_string(a) + " vs " +
                            std::to_string(b) + ")");
  }
}

SymMatrix trace_free(const Eigen::MatrixXd& a) {
  Eigen::MatrixXd out = a;
  out.diagonal().array() -= a.trace() / static_cast<double>(a.rows());
  return SymMatrix(out);
}

// Lexicographic order on entries; used to evaluate symmetric functions with a
// fixed argument order so that f(a, b) and f(b, a) are bitwise equal.
bool entries_less(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const double* x = a.data();
  const double* y = b.data();
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (x[k] != y[k]) return x[k] < y[k];
  }
  return false;
}

// Eigendecomposition of P1^-1 P2^2 P1^-1.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> relative_decomposition(const UnitDetSpd& p1,
                                                                      const UnitDetSpd& p2) {
  const Eigen::MatrixXd m = p1.spd().inverse() * p2.matrix();
  const Eigen::MatrixXd x = m * m.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (x + x.transpose()));
  if (es.info() != Eigen::Success) throw std::runtime_error("relative eigendecomposition failed");
  return es;
}

}  // namespace

Spd sym_sqrt(const Spd& p) {
  return Spd::from_eigen(p.eigenvalues().cwiseSqrt(), p.eigenvectors());
}

SymMatrix sym_log(const Spd& p) { return SymMatrix(p.log()); }

Spd sym_exp(const SymMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a.matrix());
  if (es.info() != Eigen::Success) throw std::runtime_error("sym_exp: eigendecomposition failed");
  return Spd::from_eigen(es.eigenvalues().array().exp().matrix(), es.eigenvectors());
}

DetSplit normalize_det(const Spd& p) {
  const double c = p.log_det() / static_cast<double>(p.dim());
  return {UnitDetSpd::rescaled(p), LogDetChannel{c}};
}

Spd recombine(const UnitDetSpd& unit, LogDetChannel channel) {
  const Spd& u = unit.spd();
  return Spd::from_eigen(u.eigenvalues() * std::exp(channel.value), u.eigenvectors());
}

double dist_unitdet(const UnitDetSpd& p1, const UnitDetSpd& p2) {
  require_same_dim(p1.dim(), p2.dim(), "dist_unitdet");
  if (p1.same_as(p2)) return 0.0;
  const bool swap = entries_less(p2.matrix(), p1.matrix());
  const auto es = swap ? relative_decomposition(p2, p1) : relative_decomposition(p1, p2);
  const Eigen::VectorXd& l = es.eigenvalues();
  if (!(l(0) > 0.0)) throw NotPositiveDefinite(l(0), "dist_unitdet");
  return 0.5 * l.array().log().matrix().norm();
}

double dist_full(const Spd& p1, const Spd& p2, std::optional<double> w_det) {
  require_same_dim(p1.dim(), p2.dim(), "dist_full");
  const double w = w_det.value_or(1.0 / static_cast<double>(p1.dim()));
  if (!(w >= 0.0)) throw std::invalid_argument("dist_full: w_det must be nonnegative");
  if (p1.same_as(p2)) return 0.0;
  const DetSplit a = normalize_det(p1);
  const DetSplit b = normalize_det(p2);
  const double du = dist_unitdet(a.unit, b.unit);
  const double dld = p2.log_det() - p1.log_det();
  return std::sqrt(du * du + w * dld * dld);
}

double log_euclidean_dist(const Spd& p1, const Spd& p2) {
  require_same_dim(p1.dim(), p2.dim(), "log_euclidean_dist");
  if (p1.same_as(p2)) return 0.0;
  return (p1.log() - p2.log()).norm();
}

double inner(const UnitDetSpd& base, const TangentVector& v, const TangentVector& w) {
  if (!base.same_as(v.base()) || !base.same_as(w.base())) {
    throw std::invalid_argument("inner: tangent vectors are not anchored at the given base");
  }
  return v.coords().matrix().cwiseProduct(w.coords().matrix()).sum();
}

double norm(const TangentVector& v) { return v.coords().norm(); }

UnitDetSpd exp_map(const TangentVector& v) {
  const UnitDetSpd& base = v.base();
  if (v.coords().norm() == 0.0) return base;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v.coords().matrix());
  const Eigen::MatrixXd e2v =
      es.eigenvectors() * (2.0 * es.eigenvalues()).array().exp().matrix().asDiagonal() *
      es.eigenvectors().transpose();
  const Eigen::MatrixXd& p = base.matrix();
  const Eigen::MatrixXd y = p * e2v * p;
  return UnitDetSpd::rescaled(sym_sqrt(Spd(0.5 * (y + y.transpose()))));
}

TangentVector log_map(const UnitDetSpd& p1, const UnitDetSpd& p2) {
  require_same_dim(p1.dim(), p2.dim(), "log_map");
  if (p1.same_as(p2)) return TangentVector::zero(p1);
  const auto es = relative_decomposition(p1, p2);
  if (!(es.eigenvalues()(0) > 0.0)) throw NotPositiveDefinite(es.eigenvalues()(0), "log_map");
  const Eigen::VectorXd half_log = 0.5 * es.eigenvalues().array().log().matrix();
  const Eigen::MatrixXd v = es.eigenvectors() * half_log.asDiagonal() * es.eigenvectors().transpose();
  return TangentVector(p1, trace_free(v));
}

UnitDetSpd geodesic(const UnitDetSpd& p1, const UnitDetSpd& p2, double t) {
  require_same_dim(p1.dim(), p2.dim(), "geodesic");
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("geodesic: t must lie in [0,1]");
  if (t == 0.0) return p1;
  if (t == 1.0) return p2;
  return exp_map(log_map(p1, p2) * t);
}

Eigen::MatrixXd transport_rotation(const UnitDetSpd& p1, const UnitDetSpd& p2) {
  require_same_dim(p1.dim(), p2.dim(), "parallel_transport");
  if (p1.same_as(p2)) return Eigen::MatrixXd::Identity(p1.dim(), p1.dim());
  // R = P2^-1 P1 sqrt(P1^-1 P2^2 P1^-1); orthogonal by construction.
  const auto es = relative_decomposition(p1, p2);
  const Eigen::MatrixXd root =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  return p2.spd().inverse() * p1.matrix() * root;
}

TangentVector parallel_transport(const TangentVector& v, const UnitDetSpd& to) {
  if (v.base().same_as(to)) return TangentVector(to, v.coords());
  const Eigen::MatrixXd r = transport_rotation(v.base(), to);
  return TangentVector(to, trace_free(r * v.coords().matrix() * r.transpose()));
}

TangentVector parallel_transport(const TangentVector& v, const UnitDetSpd& from, const UnitDetSpd& to) {
  require_same_dim(from.dim(), to.dim(), "parallel_transport");
  require_same_dim(v.dim(), to.dim(), "parallel_transport");
  if (!v.base().same_as(from)) throw std::invalid_argument("parallel_transport: vector is not anchored at the source point");
  return parallel_transport(v, to);
}

Spd interpolate(const Spd& p1, const Spd& p2, double t) {
  require_same_dim(p1.dim(), p2.dim(), "interpolate");
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("interpolate: t must lie in [0,1]");
  if (t == 0.0) return p1;
  if (t == 1.0) return p2;
  const DetSplit a = normalize_det(p1);
  const DetSplit b = normalize_det(p2);
  const UnitDetSpd u = geodesic(a.unit, b.unit, t);
  return recombine(u, LogDetChannel{(1.0 - t) * a.channel.value + t * b.channel.value});
}

}  // namespace spdtraj
