#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>

namespace spdtraj {

/// Eigenvalue floor below which a matrix is not treated as positive definite.
inline constexpr double kPdEpsilon = 1e-12;

/// Tolerance on |log det| accepted for unit-determinant matrices.
inline constexpr double kUnitDetTolerance = 1e-8;

/// Square symmetric matrix. Construction symmetrizes, so entries(i,j) and
/// entries(j,i) are bit-identical.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Eigen::MatrixXd& a);

  static SymMatrix zero(Eigen::Index n) { return SymMatrix(Eigen::MatrixXd::Zero(n, n)); }
  static SymMatrix identity(Eigen::Index n) { return SymMatrix(Eigen::MatrixXd::Identity(n, n)); }

  Eigen::Index dim() const { return m_.rows(); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }
  double trace() const { return m_.trace(); }
  double norm() const { return m_.norm(); }

  SymMatrix operator+(const SymMatrix& o) const;
  SymMatrix operator-(const SymMatrix& o) const;
  SymMatrix operator*(double s) const;

 private:
  Eigen::MatrixXd m_;
};

inline SymMatrix operator*(double s, const SymMatrix& a) { return a * s; }

namespace detail {
struct SpdStorage {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd eigenvectors;
};
}  // namespace detail

/// Symmetric positive-definite matrix. The eigendecomposition is computed once
/// at construction and carried along; values are immutable and cheap to copy.
class Spd {
 public:
  /// Validates symmetry and positive definiteness; throws NotPositiveDefinite
  /// naming the smallest eigenvalue when it falls below kPdEpsilon.
  explicit Spd(const Eigen::MatrixXd& m);

  /// Builds from a known decomposition V diag(lambda) V^T.
  static Spd from_eigen(const Eigen::VectorXd& eigenvalues, const Eigen::MatrixXd& eigenvectors);

  static Spd identity(Eigen::Index n);

  Eigen::Index dim() const { return s_->matrix.rows(); }
  const Eigen::MatrixXd& matrix() const { return s_->matrix; }
  const Eigen::VectorXd& eigenvalues() const { return s_->eigenvalues; }
  const Eigen::MatrixXd& eigenvectors() const { return s_->eigenvectors; }
  double min_eigenvalue() const { return s_->eigenvalues(0); }
  double log_det() const { return s_->eigenvalues.array().log().sum(); }

  /// V f(Lambda) V^T for a scalar function f.
  Eigen::MatrixXd spectral(const std::function<double(double)>& f) const;
  Eigen::MatrixXd inverse() const;
  Eigen::MatrixXd sqrt() const;
  Eigen::MatrixXd inv_sqrt() const;
  Eigen::MatrixXd log() const;
  Eigen::MatrixXd pow(double t) const;

  bool same_as(const Spd& o) const;

 private:
  explicit Spd(std::shared_ptr<const detail::SpdStorage> s) : s_(std::move(s)) {}
  std::shared_ptr<const detail::SpdStorage> s_;
};

/// Spd with |log det| <= kUnitDetTolerance.
class UnitDetSpd {
 public:
  explicit UnitDetSpd(Spd p);
  explicit UnitDetSpd(const Eigen::MatrixXd& m) : UnitDetSpd(Spd(m)) {}
  static UnitDetSpd identity(Eigen::Index n) { return UnitDetSpd(Spd::identity(n)); }

  /// Rescales p to unit determinant.
  static UnitDetSpd rescaled(const Spd& p);

  const Spd& spd() const { return p_; }
  Eigen::Index dim() const { return p_.dim(); }
  const Eigen::MatrixXd& matrix() const { return p_.matrix(); }
  bool same_as(const UnitDetSpd& o) const { return p_.same_as(o.p_); }

 private:
  Spd p_;
};

/// (1/n) log det of a full SPD matrix.
struct LogDetChannel {
  double value = 0.0;
};

/// Tangent vector on the unit-determinant manifold, expressed in the frame
/// translated to the identity. Coordinates are symmetric and trace-free, and
/// the base point travels with the vector.
class TangentVector {
 public:
  TangentVector(UnitDetSpd base, SymMatrix coords);
  static TangentVector zero(const UnitDetSpd& base);

  const UnitDetSpd& base() const { return base_; }
  const SymMatrix& coords() const { return coords_; }
  Eigen::Index dim() const { return coords_.dim(); }

  TangentVector operator+(const TangentVector& o) const;
  TangentVector operator-(const TangentVector& o) const;
  TangentVector operator*(double s) const;

 private:
  UnitDetSpd base_;
  SymMatrix coords_;
};

inline TangentVector operator*(double s, const TangentVector& v) { return v * s; }

}  // namespace spdtraj
