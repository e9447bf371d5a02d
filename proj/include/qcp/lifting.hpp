#pragma once

// Non-solid ordering cones: one extra image coordinate eta = -e^T y turns a
// pointed cone C into the solid pointed cone R, and the lifted objective
// is -inf off the half-space e^T y + eta >= 0. Also hosts the driver that
// orients, lifts and dispatches a QcpProblem to one of the algorithms.

#include "qcp/qcp_solver.hpp"

#include <string>

namespace qcp {

struct LiftedProblem {
  QcpProblem base;
  QcpProblem lifted;  // dimension q + 1
};

/// Generators of R: the unit vectors of R^{q+1} and (Y_j, -e^T Y_j).
inline Matrix lifted_cone_generators(const PolyCone& cone) {
  const Eigen::Index q = cone.dim();
  const Eigen::Index o = cone.Y.cols();
  Matrix R = Matrix::Zero(q + 1, q + 1 + o);
  R.leftCols(q + 1).setIdentity();
  for (Eigen::Index j = 0; j < o; ++j) {
    R.block(0, q + 1 + j, q, 1) = cone.Y.col(j);
    R(q, q + 1 + j) = -cone.Y.col(j).sum();
  }
  return R;
}

inline LiftedProblem lift_problem(const QcpProblem& p) {
  const VlpProblem& v = p.vlp;
  const Eigen::Index q = v.q();
  if (!v.cone.is_pointed()) throw Error(ErrorKind::non_pointed_cone, "cannot lift a non-pointed cone");

  LiftedProblem out;
  out.base = p;
  VlpProblem& l = out.lifted.vlp;
  l.P = Matrix(q + 1, v.n());
  l.P.topRows(q) = v.P;
  l.P.row(q) = -v.P.colwise().sum();
  l.A = v.A;
  l.b = v.b;
  l.cone = PolyCone::from_generators(lifted_cone_generators(v.cone));
  if (!l.cone.is_pointed() || !l.cone.is_solid())
    throw Error(ErrorKind::assumption_violated, "lifted cone is not solid and pointed");
  l.c = Vector();  // chosen by the driver

  const Objective f = p.f;
  out.lifted.f.description = "lifted(" + f.description + ")";
  out.lifted.f.eval = [f, q](const Vector& z) {
    const Vector y = z.head(q);
    const double h = y.sum() + z[q];
    if (h < -kFeasTol * scale_of(z)) return -kInf;
    return f(y);
  };
  return out;
}

/// Drops the extra coordinate; verifies that the lifted solution lies on e^T y + eta = 0.
inline QcpResult project_back(const QcpResult& lifted_result, const QcpProblem& base) {
  const Eigen::Index q = lifted_result.y.size() - 1;
  const double residual = lifted_result.y.head(q).sum() + lifted_result.y[q];
  if (std::abs(residual) > 1e-6 * scale_of(lifted_result.y))
    throw Error(ErrorKind::numerical, "lifted solution is off the hyperplane (residual " + std::to_string(residual) + ")");
  QcpResult r = lifted_result;
  r.y = lifted_result.y.head(q);
  r.value = base.f(r.y);
  r.lifted = true;
  return r;
}

/// The naive one-dimensional extension with variables (x, y): image
/// (y, -e^T y), ordering cone R^{q+1}_+, constraints A x >= b and
/// Z^T y >= Z^T P x. It is unbounded whenever C != {0}.
inline VlpProblem naive_lifted_vlp(const VlpProblem& v) {
  const Eigen::Index q = v.q(), n = v.n(), m = v.m();
  const Matrix& Z = v.cone.Z;
  VlpProblem out;
  out.P = Matrix::Zero(q + 1, n + q);
  out.P.block(0, n, q, q).setIdentity();
  out.P.block(q, n, 1, q).setConstant(-1.0);
  out.A = Matrix::Zero(m + Z.cols(), n + q);
  out.A.topLeftCorner(m, n) = v.A;
  out.A.bottomLeftCorner(Z.cols(), n) = -Z.transpose() * v.P;
  out.A.bottomRightCorner(Z.cols(), q) = Z.transpose();
  out.b = Vector::Zero(m + Z.cols());
  out.b.head(m) = v.b;
  out.cone = PolyCone::nonnegative_orthant(q + 1);
  out.c = Vector::Ones(q + 1);
  return out;
}

enum class Algorithm { primal, dual, dual_se };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::primal: return "primal";
    case Algorithm::dual: return "dual";
    case Algorithm::dual_se: return "dual-se";
  }
  return "unknown";
}

/// Replaces (C, P, c, f) by (-C, -P, -c, f(-.)) when the chosen interior
/// point has c_q = -1; solutions map back through y -> -y.
inline QcpProblem flip_orientation(const QcpProblem& p) {
  QcpProblem out = p;
  out.vlp.P = -p.vlp.P;
  out.vlp.cone = PolyCone(-p.vlp.cone.Y, -p.vlp.cone.Z);
  out.vlp.c = -p.vlp.c;
  const Objective f = p.f;
  out.f.eval = [f](const Vector& y) { return f(Vector(-y)); };
  return out;
}

/// Solves a QCP with any pointed cone: picks c if needed, flips the
/// orientation when c_q = -1, lifts non-solid cones, and runs `alg`.
inline QcpResult solve_qcp(const QcpProblem& p, Algorithm alg, const QcpOptions& options = {}) {
  if (!p.vlp.cone.is_pointed()) throw Error(ErrorKind::non_pointed_cone, "ordering cone is not pointed");
  if (!p.vlp.cone.is_solid()) {
    const LiftedProblem lp = lift_problem(p);
    return project_back(solve_qcp(lp.lifted, alg, options), p);
  }
  QcpProblem work = p;
  if (work.vlp.c.size() == 0) work.vlp.c = cone_interior_point(work.vlp.cone);
  const double cq = work.vlp.c[work.vlp.q() - 1];
  require(cq != 0.0, ErrorKind::invalid_argument, "interior point must have c_q != 0");
  work.vlp.c /= std::abs(cq);
  const bool flipped = cq < 0.0;
  if (flipped) work = flip_orientation(work);
  QcpResult r;
  switch (alg) {
    case Algorithm::primal: r = solve_primal_qcp(work, options); break;
    case Algorithm::dual: r = solve_dual_qcp(work, DualRule::min_phi, options); break;
    case Algorithm::dual_se: r = solve_dual_qcp(work, DualRule::first_violating, options); break;
  }
  if (flipped) {
    r.y = -r.y;
    r.value = p.f(r.y);
    r.flipped = true;
  }
  return r;
}

}  // namespace qcp
