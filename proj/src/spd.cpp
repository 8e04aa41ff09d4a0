#include "spdtraj/spd.hpp"

#include "spdtraj/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace spdtraj {

NotPositiveDefinite::NotPositiveDefinite(double eigenvalue, const std::string& where)
    : std::domain_error([&] {
        std::ostringstream os;
        os.precision(6);
        os << where << ": matrix is not positive definite (eigenvalue " << eigenvalue
           << " < " << kPdEpsilon << ")";
        return os.str();
      }()),
      eigenvalue_(eigenvalue) {}

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) {
    throw DimensionMismatch("expected a square matrix, got " + std::to_string(a.rows()) + "x" +
                            std::to_string(a.cols()));
  }
  if (a.size() == 0) throw std::invalid_argument("empty matrix");
  if (!a.allFinite()) throw std::invalid_argument("matrix has non-finite entries");
  return 0.5 * (a + a.transpose());
}

void require_pd(double min_eig, const char* where) {
  if (!(min_eig >= kPdEpsilon)) throw NotPositiveDefinite(min_eig, where);
}

}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& a) : m_(symmetrized(a)) {}

SymMatrix SymMatrix::operator+(const SymMatrix& o) const {
  if (dim() != o.dim()) throw DimensionMismatch("SymMatrix +: dimension mismatch");
  return SymMatrix(m_ + o.m_);
}

SymMatrix SymMatrix::operator-(const SymMatrix& o) const {
  if (dim() != o.dim()) throw DimensionMismatch("SymMatrix -: dimension mismatch");
  return SymMatrix(m_ - o.m_);
}

SymMatrix SymMatrix::operator*(double s) const { return SymMatrix(m_ * s); }

Spd::Spd(const Eigen::MatrixXd& m) {
  Eigen::MatrixXd sym = symmetrized(m);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale) {
    throw std::invalid_argument("Spd: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("Spd: eigendecomposition failed");
  require_pd(es.eigenvalues()(0), "Spd");
  auto st = std::make_shared<detail::SpdStorage>();
  st->matrix = std::move(sym);
  st->eigenvalues = es.eigenvalues();
  st->eigenvectors = es.eigenvectors();
  s_ = std::move(st);
}

Spd Spd::from_eigen(const Eigen::VectorXd& eigenvalues, const Eigen::MatrixXd& eigenvectors) {
  if (eigenvectors.rows() != eigenvectors.cols() || eigenvectors.cols() != eigenvalues.size()) {
    throw DimensionMismatch("Spd::from_eigen: inconsistent decomposition");
  }
  // Keep eigenvalues ascending, as the solver produces them.
  std::vector<Eigen::Index> order(eigenvalues.size());
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return eigenvalues(a) < eigenvalues(b); });
  auto st = std::make_shared<detail::SpdStorage>();
  st->eigenvalues.resize(eigenvalues.size());
  st->eigenvectors.resize(eigenvectors.rows(), eigenvectors.cols());
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) {
    st->eigenvalues(k) = eigenvalues(order[k]);
    st->eigenvectors.col(k) = eigenvectors.col(order[k]);
  }
  if (!st->eigenvalues.allFinite()) throw std::invalid_argument("Spd::from_eigen: non-finite eigenvalue");
  require_pd(st->eigenvalues(0), "Spd::from_eigen");
  const Eigen::MatrixXd m =
      st->eigenvectors * st->eigenvalues.asDiagonal() * st->eigenvectors.transpose();
  st->matrix = 0.5 * (m + m.transpose());
  return Spd(std::shared_ptr<const detail::SpdStorage>(std::move(st)));
}

Spd Spd::identity(Eigen::Index n) {
  return from_eigen(Eigen::VectorXd::Ones(n), Eigen::MatrixXd::Identity(n, n));
}

Eigen::MatrixXd Spd::spectral(const std::function<double(double)>& f) const {
  Eigen::VectorXd fl = s_->eigenvalues.unaryExpr(f);
  const Eigen::MatrixXd& v = s_->eigenvectors;
  Eigen::MatrixXd out = v * fl.asDiagonal() * v.transpose();
  return 0.5 * (out + out.transpose());
}

Eigen::MatrixXd Spd::inverse() const {
  return spectral([](double l) { return 1.0 / l; });
}

Eigen::MatrixXd Spd::sqrt() const {
  return spectral([](double l) { return std::sqrt(l); });
}

Eigen::MatrixXd Spd::inv_sqrt() const {
  return spectral([](double l) { return 1.0 / std::sqrt(l); });
}

Eigen::MatrixXd Spd::log() const {
  return spectral([](double l) { return std::log(l); });
}

Eigen::MatrixXd Spd::pow(double t) const {
  return spectral([t](double l) { return std::pow(l, t); });
}

bool Spd::same_as(const Spd& o) const {
  if (s_ == o.s_) return true;
  return s_->matrix.rows() == o.s_->matrix.rows() && s_->matrix == o.s_->matrix;
}

UnitDetSpd::UnitDetSpd(Spd p) : p_(std::move(p)) {
  const double ld = p_.log_det();
  if (!(std::abs(ld) <= kUnitDetTolerance)) {
    throw std::invalid_argument("UnitDetSpd: |log det| = " + std::to_string(std::abs(ld)) +
                                " exceeds tolerance");
  }
}

UnitDetSpd UnitDetSpd::rescaled(const Spd& p) {
  const double c = p.log_det() / static_cast<double>(p.dim());
  if (c == 0.0) return UnitDetSpd(p);
  const double s = std::exp(-c);
  return UnitDetSpd(Spd::from_eigen(p.eigenvalues() * s, p.eigenvectors()));
}

TangentVector::TangentVector(UnitDetSpd base, SymMatrix coords)
    : base_(std::move(base)), coords_(std::move(coords)) {
  if (coords_.dim() != base_.dim()) throw DimensionMismatch("TangentVector: coords/base dimension mismatch");
  if (!(std::abs(coords_.trace()) <= kUnitDetTolerance * std::max(1.0, coords_.norm()))) {
    throw std::invalid_argument("TangentVector: coordinates must be trace-free at a unit-determinant base (trace " +
                                std::to_string(coords_.trace()) + ")");
  }
}

TangentVector TangentVector::zero(const UnitDetSpd& base) {
  return TangentVector(base, SymMatrix::zero(base.dim()));
}

TangentVector TangentVector::operator+(const TangentVector& o) const {
  if (!base_.same_as(o.base_)) throw std::invalid_argument("TangentVector +: vectors anchored at different base points");
  return TangentVector(base_, coords_ + o.coords_);
}

TangentVector TangentVector::operator-(const TangentVector& o) const {
  if (!base_.same_as(o.base_)) throw std::invalid_argument("TangentVector -: vectors anchored at different base points");
  return TangentVector(base_, coords_ - o.coords_);
}

TangentVector TangentVector::operator*(double s) const { return TangentVector(base_, coords_ * s); }

}  // namespace spdtraj
