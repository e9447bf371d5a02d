#pragma once

// Quasi-concave minimization over a polyhedral image: the modified primal
// Benson algorithm and the modified dual variant with two t* selection rules.

#include "qcp/vlp_solver.hpp"

#include <functional>
#include <random>
#include <string>
#include <utility>

namespace qcp {

/// Extended-real valued objective on R^q. Must be quasi-concave and
/// C-monotone on P[S] - C; these properties are the caller's contract.
struct Objective {
  std::function<double(const Vector&)> eval;
  std::string description;

  double operator()(const Vector& y) const { return eval(y); }
};

struct QcpProblem {
  VlpProblem vlp;  // vlp.c may be empty: it is then chosen from the cone
  Objective f;
};

struct QcpResult {
  Vector x;
  Vector y;
  double value = 0.0;
  int iterations = 0;
  int lp_solves = 0;
  int failed_cuts = 0;
  std::vector<IterationRecord> history;
  std::string algorithm;
  bool lifted = false;
  bool flipped = false;
};

enum class DualRule { min_phi, first_violating };

struct QcpOptions {
  LpBackend* backend = nullptr;
  int max_iterations = 100000;
  /// Observers of the primal outer set and (dual algorithm) the dual outer set.
  std::function<void(const OuterApprox&, const IterationRecord&)> primal_observer;
  std::function<void(const OuterApprox&, const IterationRecord&)> dual_observer;
};

/// Extended-real total order: -inf < finite < +inf; NaN is a contract violation.
inline bool extended_less(double a, double b) { return a < b; }

/// Index of the minimizer of f over `points`; ties are broken lexicographically.
inline std::size_t vertex_argmin_index(const Objective& f, const std::vector<Vector>& points) {
  require(!points.empty(), ErrorKind::invalid_argument, "argmin over an empty vertex set");
  std::size_t best = 0;
  double best_val = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const double v = f(points[k]);
    require(!std::isnan(v), ErrorKind::contract, "objective returned NaN");
    if (k == 0 || extended_less(v, best_val) || (v == best_val && lex_less(points[k], points[best]))) {
      best = k;
      best_val = v;
    }
  }
  if (best_val == kInf) throw Error(ErrorKind::contract, "objective is +infinity at the selected vertex");
  return best;
}

inline Vector vertex_argmin_f(const Objective& f, const std::vector<Vector>& points) {
  return points[vertex_argmin_index(f, points)];
}

/// x in S with P x = t, computed by minimizing the l1 residual |P x - t|.
inline Vector recover_preimage(const VlpProblem& vlp, const Vector& t, LpBackend& backend) {
  const Eigen::Index n = vlp.n(), q = vlp.q();
  LinearProgram lp = LinearProgram::free_variables(n + 2 * q);
  lp.lower.tail(2 * q).setZero();
  lp.objective.tail(2 * q).setOnes();
  Matrix rows = Matrix::Zero(vlp.m(), n + 2 * q);
  rows.leftCols(n) = vlp.A;
  lp.add_rows(rows, Sense::ge, vlp.b);
  Matrix eq(q, n + 2 * q);
  eq << vlp.P, -Matrix::Identity(q, q), Matrix::Identity(q, q);
  lp.add_rows(eq, Sense::eq, t);
  const LpSolution s = backend.solve(lp);
  if (s.status == LpStatus::infeasible) throw Error(ErrorKind::infeasible, "feasible set is empty");
  detail::raise_for(s.status, "preimage recovery");
  if (s.objective_value > 1e-6 * scale_of(t))
    throw Error(ErrorKind::infeasible, "point is not in the image P[S] (residual " +
                                           std::to_string(s.objective_value) + ")");
  return s.x.head(n);
}

inline Vector recover_preimage(const VlpProblem& vlp, const Vector& t) {
  SimplexSolver solver;
  return recover_preimage(vlp, t, solver);
}

/// Samples pairs y1 <=_C y2 from P[S] - C and counts violations of
/// f(y1) <= f(y2). Points of P[S] are convex combinations of weighted-sum
/// LP solutions; a violation is an indication that (M) fails, not a proof.
inline int spot_check_monotone(const QcpProblem& p, int pairs = 1000, std::uint64_t seed = 1, double tol = 1e-9) {
  const VlpProblem& v = p.vlp;
  const Eigen::Index q = v.q();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_nonneg = [&](Eigen::Index k) {
    Vector mu(k);
    for (Eigen::Index i = 0; i < k; ++i) mu[i] = unit(rng);
    return mu;
  };
  // dual cone weights: combinations of the columns of Z, or anything if Z spans nothing
  std::vector<Vector> anchors;
  SimplexSolver solver;
  for (int k = 0; k < 2 * static_cast<int>(q) + 4; ++k) {
    Vector w = v.cone.Z.cols() > 0 ? Vector(v.cone.Z * random_nonneg(v.cone.Z.cols())) : Vector(random_nonneg(q));
    if (v.cone.Y.cols() == 0 && k % 2 == 1) w = -w;
    LinearProgram lp = LinearProgram::free_variables(v.n());
    lp.objective = v.P.transpose() * w;
    lp.add_rows(v.A, Sense::ge, v.b);
    const LpSolution s = solver.solve(lp);
    if (s.status == LpStatus::optimal) anchors.push_back(v.P * s.x);
  }
  if (anchors.empty()) return 0;
  int violations = 0;
  for (int k = 0; k < pairs; ++k) {
    const Vector lambda = random_nonneg(static_cast<Eigen::Index>(anchors.size()));
    Vector y2 = Vector::Zero(q);
    for (std::size_t i = 0; i < anchors.size(); ++i) y2 += lambda[static_cast<Eigen::Index>(i)] * anchors[i];
    y2 /= lambda.sum();
    // both points stay in P[S] - C: y2 = p - c2, y1 = y2 - c with c in C
    Vector y1 = y2;
    if (v.cone.Y.cols() > 0) {
      y2 -= v.cone.Y * random_nonneg(v.cone.Y.cols());
      y1 = y2 - v.cone.Y * random_nonneg(v.cone.Y.cols());
    }
    const double f1 = p.f(y1), f2 = p.f(y2);
    if (f1 > f2 + tol * std::max(1.0, std::abs(f2))) ++violations;
  }
  return violations;
}

namespace detail {

inline QcpResult finish(const QcpProblem& p, Vector x, QcpResult r) {
  r.y = p.vlp.P * x;
  r.x = std::move(x);
  r.value = p.f(r.y);
  return r;
}

}  // namespace detail

/// Modified primal Benson algorithm: each turn selects a vertex of the outer
/// set minimizing f and either cuts it off or certifies it as optimal.
inline QcpResult solve_primal_qcp(const QcpProblem& p, const QcpOptions& options = {}) {
  const VlpProblem& vlp = p.vlp;
  vlp.validate();
  SimplexSolver own;
  CountingBackend backend(options.backend ? *options.backend : own);
  QcpResult res;
  res.algorithm = "primal";

  OuterApprox O = initial_outer_approx(vlp, backend);
  for (int it = 1;; ++it) {
    if (it > options.max_iterations) throw Error(ErrorKind::numerical, "primal QCP: iteration limit reached");
    const auto vertices = O.vertices();
    std::vector<Vector> points;
    for (const auto& v : vertices) points.push_back(v.point);
    const std::size_t k = vertex_argmin_index(p.f, points);
    const Vector& t = points[k];

    IterationRecord rec;
    rec.iteration = it;
    rec.t = t;
    rec.f_t = p.f(t);
    rec.lower_bound = rec.f_t;
    const P2Result r = solve_p2_d2(vlp, t, backend);
    rec.lp_status = "optimal";
    rec.test_value = r.z;
    rec.image = vlp.P * r.x;
    res.iterations = it;
    if (r.z > z_tolerance(t)) {
      O.cut(r.w, r.offset);
      rec.cut = true;
      rec.cut_normal = r.w;
      rec.cut_offset = r.offset;
      if (options.primal_observer) options.primal_observer(O, rec);
      res.history.push_back(std::move(rec));
      continue;
    }
    O.mark_processed(vertices[k].id);
    if (options.primal_observer) options.primal_observer(O, rec);
    res.history.push_back(std::move(rec));
    res.lp_solves = backend.count();
    return detail::finish(p, r.x, std::move(res));
  }
}

/// Modified dual Benson algorithm. `rule` selects the next dual vertex:
/// min_phi takes the strongest violation of the optimality condition,
/// first_violating the oldest violating vertex.
inline QcpResult solve_dual_qcp(const QcpProblem& p, DualRule rule, const QcpOptions& options = {}) {
  const VlpProblem& vlp = p.vlp;
  vlp.validate();
  SimplexSolver own;
  CountingBackend backend(options.backend ? *options.backend : own);
  const Eigen::Index q = vlp.q();
  QcpResult res;
  res.algorithm = rule == DualRule::min_phi ? "dual" : "dual-se";

  OuterApprox O = initial_outer_approx(vlp, backend);
  OuterApprox Ostar;
  Vector w = initial_dual_weight(vlp);
  Vector tstar = w;
  std::optional<std::uint64_t> tstar_id;  // empty in the first turn (t*_q = +inf)
  Vector t;

  for (int it = 1;; ++it) {
    if (it > options.max_iterations) throw Error(ErrorKind::numerical, "dual QCP: iteration limit reached");
    IterationRecord rec;
    rec.iteration = it;
    rec.t_star = tstar;
    const P1Result r = solve_p1_d1(vlp, w, backend);
    rec.lp_status = "optimal";
    const Vector y = vlp.P * r.x;
    rec.image = y;

    // Dual side: cut O* unless t* is confirmed to lie in the lower image.
    if (!tstar_id) {
      Ostar = initial_dual_approx(vlp, y);
      rec.cut = true;
    } else {
      rec.test_value = tstar[q - 1] - r.value;
      if (rec.test_value > feasibility_tolerance() * std::max(scale_of(tstar), std::abs(r.value))) {
        const auto [a, gamma] = dual_cut(y, vlp.c);
        Ostar.cut(a, gamma);
        rec.cut = true;
      } else {
        Ostar.mark_processed(*tstar_id);
      }
    }

    // Primal side: O <- O cap {y : w^T y >= w^T P x}.
    if (it >= 2 && w.dot(t) >= r.value - feasibility_tolerance() * std::max(scale_of(t), std::abs(r.value))) {
      rec.failed_cut = true;
      ++res.failed_cuts;
    }
    O.cut(w, r.value);
    rec.cut_normal = w;
    rec.cut_offset = r.value;

    std::vector<Vector> points;
    for (const auto& v : O.vertices()) points.push_back(v.point);
    t = vertex_argmin_f(p.f, points);
    rec.t = t;
    rec.f_t = p.f(t);
    rec.lower_bound = rec.f_t;
    res.iterations = it;

    // Optimality test over all dual vertices; selection only among unprocessed ones.
    const auto dverts = Ostar.vertices();
    double min_phi = kInf;
    bool violated = false;
    for (const auto& v : dverts) {
      const double ph = coupling_phi(t, v.point, vlp.c);
      min_phi = std::min(min_phi, ph);
      if (ph < -kStrictTol * std::max(scale_of(t), scale_of(v.point))) violated = true;
    }
    rec.phi = min_phi;
    if (options.primal_observer) options.primal_observer(O, rec);
    if (options.dual_observer) options.dual_observer(Ostar, rec);
    res.history.push_back(rec);
    if (!violated) break;

    const OuterApprox::Vertex* chosen = nullptr;
    double chosen_phi = kInf;
    for (const auto& v : dverts) {
      if (Ostar.is_processed(v.id)) continue;
      const double ph = coupling_phi(t, v.point, vlp.c);
      if (rule == DualRule::first_violating) {
        if (ph < -kStrictTol * std::max(scale_of(t), scale_of(v.point)) && (!chosen || v.id < chosen->id)) {
          chosen = &v;
          chosen_phi = ph;
        }
      } else if (!chosen || ph < chosen_phi) {
        chosen = &v;
        chosen_phi = ph;
      }
    }
    if (!chosen) {  // fall back to the strongest violation among unprocessed vertices
      for (const auto& v : dverts) {
        if (Ostar.is_processed(v.id)) continue;
        const double ph = coupling_phi(t, v.point, vlp.c);
        if (!chosen || ph < chosen_phi) {
          chosen = &v;
          chosen_phi = ph;
        }
      }
    }
    if (!chosen) throw Error(ErrorKind::numerical, "dual QCP: optimality violated only by processed dual vertices");
    tstar = chosen->point;
    tstar_id = chosen->id;
    w = omega(tstar, vlp.c);
  }

  const Vector x = recover_preimage(vlp, t, backend);
  res.lp_solves = backend.count();
  return detail::finish(p, x, std::move(res));
}

}  // namespace qcp
