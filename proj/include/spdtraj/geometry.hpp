#pragma once

// Riemannian geometry of SPD matrices under the quotient metric: the
// unit-determinant part is identified with SL(n)/SO(n) and the determinant is
// carried as a separate scalar channel.
//
// Tangent vectors at a unit-determinant base P are stored in the frame
// translated to the identity: a trace-free symmetric V represents the curve
// t -> sqrt(P exp(2tV) P). In this frame the metric is tr(V W) at every base.

#include "spdtraj/spd.hpp"

#include <optional>
#include <stdexcept>

namespace spdtraj {

Spd sym_sqrt(const Spd& p);
SymMatrix sym_log(const Spd& p);
Spd sym_exp(const SymMatrix& a);

struct DetSplit {
  UnitDetSpd unit;
  LogDetChannel channel;
};

/// P -> (P / det(P)^(1/n), (1/n) log det P), with the determinant taken from
/// the log-eigenvalues.
DetSplit normalize_det(const Spd& p);

/// Inverse of normalize_det.
Spd recombine(const UnitDetSpd& unit, LogDetChannel channel);

/// ||log sqrt(P1^-1 P2^2 P1^-1)||_F. Bitwise symmetric in its arguments.
double dist_unitdet(const UnitDetSpd& p1, const UnitDetSpd& p2);

/// Squared distance is dist_unitdet^2 of the unit-determinant parts plus
/// w_det * (log det P2 - log det P1)^2. w_det defaults to 1/n.
double dist_full(const Spd& p1, const Spd& p2, std::optional<double> w_det = std::nullopt);

/// ||log P1 - log P2||_F.
double log_euclidean_dist(const Spd& p1, const Spd& p2);

double inner(const UnitDetSpd& base, const TangentVector& v, const TangentVector& w);
double norm(const TangentVector& v);

UnitDetSpd exp_map(const TangentVector& v);
inline UnitDetSpd exp_map(const UnitDetSpd& base, const TangentVector& v);
TangentVector log_map(const UnitDetSpd& p1, const UnitDetSpd& p2);

/// Point at parameter t in [0,1] along the geodesic from p1 to p2.
UnitDetSpd geodesic(const UnitDetSpd& p1, const UnitDetSpd& p2, double t);

/// Orthogonal R such that transporting V from p1 to p2 along their geodesic
/// is R V R^T in identity-frame coordinates.
Eigen::MatrixXd transport_rotation(const UnitDetSpd& p1, const UnitDetSpd& p2);

TangentVector parallel_transport(const TangentVector& v, const UnitDetSpd& to);
TangentVector parallel_transport(const TangentVector& v, const UnitDetSpd& from, const UnitDetSpd& to);

/// Geodesic of the product metric between full SPD matrices: unit-determinant
/// parts along their geodesic, log-det channel linearly.
Spd interpolate(const Spd& p1, const Spd& p2, double t);

inline UnitDetSpd exp_map(const UnitDetSpd& base, const TangentVector& v) {
  if (!base.same_as(v.base())) throw std::invalid_argument("exp_map: vector is not anchored at base");
  return exp_map(v);
}

}  // namespace spdtraj
