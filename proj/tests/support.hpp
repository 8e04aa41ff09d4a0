#pragma once

// Random inputs and reference computations shared by the test programs. The
// reference routines here are deliberately written without the library's
// matrix functions so they can serve as oracles.

#include "spdtraj/geometry.hpp"
#include "spdtraj/reduction.hpp"
#include "spdtraj/trajectory.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <vector>

namespace testing_support {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd gaussian(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n01;
  MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = n01(rng);
  return m;
}

inline MatrixXd random_symmetric(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  MatrixXd a = gaussian(rng, n, n);
  return scale * 0.5 * (a + a.transpose());
}

inline MatrixXd random_trace_free(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  MatrixXd a = random_symmetric(rng, n, scale);
  a.diagonal().array() -= a.trace() / static_cast<double>(n);
  return a;
}

// exp of a symmetric matrix through an independent eigensolver call
inline MatrixXd ref_expm(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (a + a.transpose()));
  return es.eigenvectors() * es.eigenvalues().array().exp().matrix().asDiagonal() * es.eigenvectors().transpose();
}

inline MatrixXd ref_logm(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (a + a.transpose()));
  return es.eigenvectors() * es.eigenvalues().array().log().matrix().asDiagonal() * es.eigenvectors().transpose();
}

inline MatrixXd ref_powm(const MatrixXd& a, double p) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (a + a.transpose()));
  return es.eigenvectors() * es.eigenvalues().array().pow(p).matrix().asDiagonal() * es.eigenvectors().transpose();
}

// SPD matrix exp(S) with S symmetric of the given scale.
inline spdtraj::Spd random_spd(std::mt19937_64& rng, Eigen::Index n, double scale = 0.5) {
  return spdtraj::Spd(ref_expm(random_symmetric(rng, n, scale)));
}

inline spdtraj::UnitDetSpd random_unit(std::mt19937_64& rng, Eigen::Index n, double scale = 0.5) {
  return spdtraj::UnitDetSpd(spdtraj::Spd(ref_expm(random_trace_free(rng, n, scale))));
}

inline spdtraj::TangentVector random_tangent(std::mt19937_64& rng, const spdtraj::UnitDetSpd& base,
                                             double scale = 1.0) {
  return spdtraj::TangentVector(base, spdtraj::SymMatrix(random_trace_free(rng, base.dim(), scale)));
}

inline MatrixXd random_stiefel(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d) {
  Eigen::HouseholderQR<MatrixXd> qr(gaussian(rng, n, d));
  return qr.householderQ() * MatrixXd::Identity(n, d);
}

inline double max_abs(const MatrixXd& a) { return a.cwiseAbs().maxCoeff(); }

// Largest principal angle between the column spaces of orthonormal A and B,
// from the residual of B after projection onto span(A).
inline double max_principal_angle(const MatrixXd& a, const MatrixXd& b) {
  const MatrixXd r = b - a * (a.transpose() * b);
  Eigen::JacobiSVD<MatrixXd> svd(r);
  return std::asin(std::min(1.0, svd.singularValues().maxCoeff()));
}

// Distance between unit-determinant matrices from the textbook affine-invariant
// formula on X = P^2: d = 0.5 * ||log(X1^{-1/2} X2 X1^{-1/2})||.
inline double ref_dist_unitdet(const MatrixXd& p1, const MatrixXd& p2) {
  const MatrixXd x1 = p1 * p1;
  const MatrixXd x2 = p2 * p2;
  const MatrixXd r = ref_powm(x1, -0.5);
  return 0.5 * ref_logm(r * x2 * r).norm();
}

// Smooth unit-determinant curve alpha(t) = exp(A + t B + sin(pi t) C) that can
// be evaluated exactly at any t, so warped copies carry no interpolation error.
struct SmoothCurve {
  MatrixXd a, b, c;

  static SmoothCurve random(std::mt19937_64& rng, Eigen::Index n, double scale = 0.5) {
    return {random_trace_free(rng, n, 0.3), random_trace_free(rng, n, scale), random_trace_free(rng, n, scale)};
  }

  spdtraj::Spd at(double t) const {
    return spdtraj::Spd(ref_expm(a + t * b + std::sin(3.14159265358979323846 * t) * c));
  }

  spdtraj::CovarianceTrajectory sample(const std::vector<double>& times) const {
    std::vector<spdtraj::Spd> m;
    m.reserve(times.size());
    for (double t : times) m.push_back(at(t));
    return spdtraj::CovarianceTrajectory(std::move(m));
  }

  spdtraj::CovarianceTrajectory sample(std::size_t length) const { return sample(spdtraj::uniform_grid(length)); }
};

// Training set whose members differ from the identity only inside a common
// d-dimensional subspace: P_i = U blockdiag(A_i, I) U^T with det A_i = 1. The
// optimal reduction basis spans the first d columns of U.
struct BlockConstruction {
  MatrixXd rotation;  // U
  std::vector<spdtraj::UnitDetSpd> matrices;

  MatrixXd active() const { return rotation.leftCols(blocks); }
  Eigen::Index blocks = 0;

  static BlockConstruction make(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d, int count, double scale,
                                bool rotate = true) {
    BlockConstruction bc;
    bc.blocks = d;
    bc.rotation = rotate ? random_stiefel(rng, n, n) : MatrixXd::Identity(n, n);
    for (int i = 0; i < count; ++i) {
      MatrixXd full = MatrixXd::Identity(n, n);
      full.topLeftCorner(d, d) = ref_expm(random_trace_free(rng, d, scale));
      const MatrixXd p = bc.rotation * full * bc.rotation.transpose();
      bc.matrices.emplace_back(spdtraj::Spd(0.5 * (p + p.transpose())));
    }
    return bc;
  }
};

}  // namespace testing_support
