#pragma once

// Vector linear programs, their weighted-sum and reference-point
// scalarizations, and the coupling function between upper and lower images.

#include "qcp/lp.hpp"
#include "qcp/polyhedron.hpp"

#include <string>
#include <utility>

namespace qcp {

/// min_C P x  s.t.  A x >= b
struct VlpProblem {
  Matrix P;     // q x n
  Matrix A;     // m x n
  Vector b;     // m
  PolyCone cone;
  Vector c;     // interior point of C with c_q = 1

  Eigen::Index q() const { return P.rows(); }
  Eigen::Index n() const { return P.cols(); }
  Eigen::Index m() const { return A.rows(); }

  void validate() const {
    require(P.rows() >= 1 && P.cols() >= 1, ErrorKind::invalid_argument, "VLP: P must be nonempty");
    require(A.cols() == P.cols() && A.rows() == b.size(), ErrorKind::invalid_argument,
            "VLP: dimensions of P, A, b are inconsistent");
    require(P.allFinite() && A.allFinite() && b.allFinite(), ErrorKind::invalid_argument,
            "VLP: non-finite data");
    require(cone.dim() == q(), ErrorKind::invalid_argument, "VLP: cone dimension differs from q");
    require(c.size() == q(), ErrorKind::invalid_argument, "VLP: c has wrong dimension");
    if (!cone.is_pointed()) throw Error(ErrorKind::non_pointed_cone, "ordering cone is not pointed");
    if (!cone.is_solid()) throw Error(ErrorKind::non_solid_cone, "ordering cone is not solid; lift the problem");
    require(std::abs(c[q() - 1] - 1.0) <= 1e-12, ErrorKind::invalid_argument, "VLP: c_q must equal 1");
    require(is_interior(cone, c), ErrorKind::invalid_argument, "VLP: c is not an interior point of C");
  }

  bool feasible(const Vector& x, double tol = kFeasTol) const {
    if (m() == 0) return true;
    return (A * x - b).minCoeff() >= -tol * std::max(1.0, inf_norm(b));
  }
};

/// phi(y, y*) = sum_{i<q} y_i y*_i + y_q (1 - sum_{i<q} c_i y*_i) - y*_q
inline double coupling_phi(const Vector& y, const Vector& ys, const Vector& c) {
  const Eigen::Index q = y.size();
  double s = 0.0, cs = 0.0;
  for (Eigen::Index i = 0; i + 1 < q; ++i) {
    s += y[i] * ys[i];
    cs += c[i] * ys[i];
  }
  return s + y[q - 1] * (1.0 - cs) - ys[q - 1];
}

/// omega(t*) = (t*_1, ..., t*_{q-1}, 1 - sum_{i<q} c_i t*_i)
inline Vector omega(const Vector& ts, const Vector& c) {
  const Eigen::Index q = ts.size();
  Vector w = ts;
  w[q - 1] = 1.0 - c.head(q - 1).dot(ts.head(q - 1));
  return w;
}

/// Row of the half-space {y* : phi(y, y*) >= 0} written as a . y* >= gamma.
inline std::pair<Vector, double> dual_cut(const Vector& y, const Vector& c) {
  const Eigen::Index q = y.size();
  Vector a(q);
  for (Eigen::Index i = 0; i + 1 < q; ++i) a[i] = y[i] - y[q - 1] * c[i];
  a[q - 1] = -1.0;
  return {a, -y[q - 1]};
}

struct P2Result {
  Vector x;
  double z = 0.0;
  Vector u;
  Vector w;
  double offset = 0.0;  // b^T u: the cut is {y : w^T y >= offset}
};

struct P1Result {
  Vector x;
  Vector u;
  double value = 0.0;  // w^T P x
};

namespace detail {

inline void raise_for(LpStatus status, const char* what) {
  switch (status) {
    case LpStatus::optimal: return;
    case LpStatus::infeasible: throw Error(ErrorKind::infeasible, std::string(what) + ": feasible set is empty");
    case LpStatus::unbounded:
      throw Error(ErrorKind::assumption_violated, std::string(what) + ": LP unbounded, P[S] is not C-bounded");
    case LpStatus::numerical_failure:
      throw Error(ErrorKind::numerical, std::string(what) + ": LP solver numerical failure");
  }
}

}  // namespace detail

/// Reference-point scalarization: min z s.t. A x >= b, Z^T(t + z c - P x) >= 0,
/// with the dual (u, w) read off the LP multipliers.
inline P2Result solve_p2_d2(const VlpProblem& vlp, const Vector& t, LpBackend& backend) {
  const Eigen::Index n = vlp.n(), m = vlp.m();
  const Matrix& Z = vlp.cone.Z;
  LinearProgram lp = LinearProgram::free_variables(n + 1);
  lp.objective[n] = 1.0;
  Matrix rows = Matrix::Zero(m, n + 1);
  rows.leftCols(n) = vlp.A;
  lp.add_rows(rows, Sense::ge, vlp.b);
  Matrix cone_rows(Z.cols(), n + 1);
  cone_rows.leftCols(n) = -Z.transpose() * vlp.P;
  cone_rows.col(n) = Z.transpose() * vlp.c;
  lp.add_rows(cone_rows, Sense::ge, -Z.transpose() * t);

  const LpSolution s = backend.solve(lp);
  detail::raise_for(s.status, "P2");

  P2Result r;
  r.x = s.x.head(n);
  r.z = s.x[n];
  r.u = s.duals.head(m);
  r.w = Z * s.duals.tail(Z.cols());
  const double cw = vlp.c.dot(r.w);
  require(cw > 0.0, ErrorKind::numerical, "P2: dual weight has c^T w <= 0");
  r.w /= cw;
  r.u /= cw;
  r.offset = vlp.b.dot(r.u);
  return r;
}

inline P2Result solve_p2_d2(const VlpProblem& vlp, const Vector& t) {
  SimplexSolver solver;
  return solve_p2_d2(vlp, t, solver);
}

/// Weighted-sum scalarization min w^T P x over S with the dual multipliers u.
inline P1Result solve_p1_d1(const VlpProblem& vlp, const Vector& w, LpBackend& backend) {
  LinearProgram lp = LinearProgram::free_variables(vlp.n());
  lp.objective = vlp.P.transpose() * w;
  lp.add_rows(vlp.A, Sense::ge, vlp.b);
  const LpSolution s = backend.solve(lp);
  detail::raise_for(s.status, "P1");
  return P1Result{s.x, s.duals, w.dot(vlp.P * s.x)};
}

inline P1Result solve_p1_d1(const VlpProblem& vlp, const Vector& w) {
  SimplexSolver solver;
  return solve_p1_d1(vlp, w, solver);
}

/// Verifies that P[S] is C-bounded by minimizing z^T P x over S for every
/// inequality normal z of C; returns the optimal values.
inline Vector check_boundedness(const VlpProblem& vlp, LpBackend& backend) {
  const Matrix& Z = vlp.cone.Z;
  Vector beta(Z.cols());
  for (Eigen::Index i = 0; i < Z.cols(); ++i) beta[i] = solve_p1_d1(vlp, Z.col(i), backend).value;
  return beta;
}

inline Vector check_boundedness(const VlpProblem& vlp) {
  SimplexSolver solver;
  return check_boundedness(vlp, solver);
}

/// Counts the LPs solved through it.
class CountingBackend final : public LpBackend {
 public:
  explicit CountingBackend(LpBackend& inner) : inner_(&inner) {}
  LpSolution solve(const LinearProgram& lp) override {
    ++count_;
    return inner_->solve(lp);
  }
  int count() const { return count_; }

 private:
  LpBackend* inner_;
  int count_ = 0;
};

}  // namespace qcp
