#pragma once

// Benson's outer approximation algorithm for the upper image of a VLP, its
// dual variant for the lower image, and a geometric-duality cross check.

#include "qcp/scalarization.hpp"

#include <functional>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

namespace qcp {

/// One row of the iteration log shared by all algorithms. Fields that an
/// algorithm does not use stay empty / NaN.
struct IterationRecord {
  static constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  int iteration = 0;
  Vector t;                // selected primal vertex
  double f_t = kNaN;
  Vector t_star;           // selected dual vertex
  double phi = kNaN;
  std::string lp_status;
  double test_value = kNaN;  // z of P2, or t*_q - w^T P x
  Vector image;            // P x of the LP solution
  Vector cut_normal;       // normal of the cut applied this turn (empty if none)
  double cut_offset = kNaN;
  bool cut = false;
  bool failed_cut = false;
  double lower_bound = kNaN;  // min of f over the vertices of the primal outer set
};

namespace detail {

inline void write_vector(std::ostream& os, const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ";" : "") << v[i];
}

}  // namespace detail

inline void write_iteration_log_csv(std::ostream& os, const std::vector<IterationRecord>& log) {
  os << "iteration,t,f_t,t_star,phi,lp_status,test_value,image,cut_normal,cut_offset,cut,failed_cut,lower_bound\n";
  os.precision(17);
  for (const auto& r : log) {
    os << r.iteration << ',';
    detail::write_vector(os, r.t);
    os << ',' << r.f_t << ',';
    detail::write_vector(os, r.t_star);
    os << ',' << r.phi << ',' << r.lp_status << ',' << r.test_value << ',';
    detail::write_vector(os, r.image);
    os << ',';
    detail::write_vector(os, r.cut_normal);
    os << ',' << r.cut_offset << ',' << (r.cut ? 1 : 0) << ',' << (r.failed_cut ? 1 : 0) << ',' << r.lower_bound
       << '\n';
  }
}

struct BensonOptions {
  LpBackend* backend = nullptr;  // defaults to a private SimplexSolver
  int max_iterations = 100000;
  /// Called after every iteration with the current primal (or dual) outer set.
  std::function<void(const OuterApprox&, const IterationRecord&)> observer;
};

struct PrimalImage {
  OuterApprox approx;
  std::vector<Vector> vertices;
  std::vector<Vector> directions;
  std::vector<Vector> preimages;  // x with P x = vertex, same order as vertices
  int iterations = 0;
  int lp_solves = 0;
  int cuts = 0;
  std::vector<IterationRecord> log;
};

struct DualImage {
  OuterApprox approx;
  std::vector<Vector> vertices;  // recession direction is always -e_q
  int iterations = 0;
  int lp_solves = 0;
  int cuts = 0;
  std::vector<IterationRecord> log;
};

struct ImagePair {
  std::vector<Vector> primal_points;
  std::vector<Vector> primal_dirs;
  std::vector<Vector> dual_points;
  HPolyhedron primal_hrep;
  HPolyhedron dual_hrep;
  Vector c;
};

inline ImagePair make_image_pair(const PrimalImage& p, const DualImage& d, const Vector& c) {
  return ImagePair{p.vertices, p.directions, d.vertices, p.approx.hrep(), d.approx.hrep(), c};
}

/// O = {y : Z^T y >= beta}, beta_i = min z_i^T P x over S.
inline OuterApprox initial_outer_approx(const VlpProblem& vlp, LpBackend& backend) {
  const Vector beta = check_boundedness(vlp, backend);
  return OuterApprox::from_hrep(HPolyhedron(vlp.cone.Z.transpose(), beta));
}

inline OuterApprox initial_outer_approx(const VlpProblem& vlp) {
  SimplexSolver solver;
  return initial_outer_approx(vlp, solver);
}

/// Lexicographically smallest vertex not yet processed.
inline std::optional<OuterApprox::Vertex> lex_smallest_unprocessed(const OuterApprox& approx) {
  std::optional<OuterApprox::Vertex> best;
  for (auto& v : approx.vertices()) {
    if (approx.is_processed(v.id)) continue;
    if (!best || lex_less(v.point, best->point)) best = std::move(v);
  }
  return best;
}

/// Reference-point test tolerance for z > 0.
inline double z_tolerance(const Vector& t) { return feasibility_tolerance() * scale_of(t); }

/// Computes the upper image P[S] + C by Benson's primal outer approximation.
inline PrimalImage benson_primal(const VlpProblem& vlp, OuterApprox O0, const BensonOptions& options = {}) {
  vlp.validate();
  SimplexSolver own;
  CountingBackend backend(options.backend ? *options.backend : own);
  PrimalImage out;
  out.approx = std::move(O0);
  OuterApprox& O = out.approx;
  std::vector<std::pair<std::uint64_t, Vector>> confirmed;

  for (int it = 1;; ++it) {
    const auto t = lex_smallest_unprocessed(O);
    if (!t) break;
    if (it > options.max_iterations) throw Error(ErrorKind::numerical, "Benson primal: iteration limit reached");
    IterationRecord rec;
    rec.iteration = it;
    rec.t = t->point;
    const P2Result r = solve_p2_d2(vlp, t->point, backend);
    rec.lp_status = "optimal";
    rec.test_value = r.z;
    rec.image = vlp.P * r.x;
    if (r.z > z_tolerance(t->point)) {
      O.cut(r.w, r.offset);
      rec.cut = true;
      rec.cut_normal = r.w;
      rec.cut_offset = r.offset;
      ++out.cuts;
    } else {
      O.mark_processed(t->id);
      confirmed.emplace_back(t->id, r.x);
    }
    out.iterations = it;
    if (options.observer) options.observer(O, rec);
    out.log.push_back(std::move(rec));
  }

  for (const auto& v : O.vertices()) {
    out.vertices.push_back(v.point);
    Vector x;
    for (const auto& [id, xx] : confirmed)
      if (id == v.id) x = xx;
    out.preimages.push_back(x);
  }
  for (Eigen::Index j = 0; j < vlp.cone.Y.cols(); ++j) {
    Vector d = vlp.cone.Y.col(j);
    detail::normalize_ray(d);
    out.directions.push_back(d);
  }
  out.lp_solves = backend.count();
  return out;
}

/// Initial dual outer set: Delta = {y* : y^T omega(y*) >= 0 for y in columns of Y},
/// intersected with the first dual cut.
inline OuterApprox initial_dual_approx(const VlpProblem& vlp, const Vector& first_image) {
  const Eigen::Index q = vlp.q();
  const Matrix& Y = vlp.cone.Y;
  Matrix N(Y.cols() + 1, q);
  Vector o(Y.cols() + 1);
  for (Eigen::Index j = 0; j < Y.cols(); ++j) {
    for (Eigen::Index i = 0; i + 1 < q; ++i) N(j, i) = Y(i, j) - Y(q - 1, j) * vlp.c[i];
    N(j, q - 1) = 0.0;
    o[j] = -Y(q - 1, j);
  }
  const auto [a, gamma] = dual_cut(first_image, vlp.c);
  N.row(Y.cols()) = a.transpose();
  o[Y.cols()] = gamma;
  return OuterApprox::from_hrep(HPolyhedron(N, o));
}

/// Weight vector for the first dual iteration: sum of the columns of Z scaled to c^T w = 1.
inline Vector initial_dual_weight(const VlpProblem& vlp) {
  const Vector w = vlp.cone.Z.rowwise().sum();
  const double cw = vlp.c.dot(w);
  require(cw > 0.0, ErrorKind::numerical, "c^T w <= 0 for the initial dual weight");
  return w / cw;
}

/// Computes the lower image of the geometric dual problem by the dual variant
/// of Benson's algorithm.
inline DualImage benson_dual(const VlpProblem& vlp, const BensonOptions& options = {}) {
  vlp.validate();
  SimplexSolver own;
  CountingBackend backend(options.backend ? *options.backend : own);
  DualImage out;
  const Eigen::Index q = vlp.q();

  // First iteration: t*_q = +infinity, so the sign test always asks for a cut.
  Vector w = initial_dual_weight(vlp);
  {
    IterationRecord rec;
    rec.iteration = 1;
    rec.t_star = w;
    const P1Result r = solve_p1_d1(vlp, w, backend);
    rec.lp_status = "optimal";
    rec.image = vlp.P * r.x;
    rec.test_value = IterationRecord::kNaN;
    out.approx = initial_dual_approx(vlp, rec.image);
    const auto [a, gamma] = dual_cut(rec.image, vlp.c);
    rec.cut = true;
    rec.cut_normal = a;
    rec.cut_offset = gamma;
    out.cuts = 1;
    out.iterations = 1;
    if (options.observer) options.observer(out.approx, rec);
    out.log.push_back(std::move(rec));
  }

  OuterApprox& O = out.approx;
  for (int it = 2;; ++it) {
    const auto ts = lex_smallest_unprocessed(O);
    if (!ts) break;
    if (it > options.max_iterations) throw Error(ErrorKind::numerical, "Benson dual: iteration limit reached");
    IterationRecord rec;
    rec.iteration = it;
    rec.t_star = ts->point;
    w = omega(ts->point, vlp.c);
    const P1Result r = solve_p1_d1(vlp, w, backend);
    rec.lp_status = "optimal";
    rec.image = vlp.P * r.x;
    rec.test_value = ts->point[q - 1] - r.value;
    if (rec.test_value > feasibility_tolerance() * std::max(scale_of(ts->point), std::abs(r.value))) {
      const auto [a, gamma] = dual_cut(rec.image, vlp.c);
      O.cut(a, gamma);
      rec.cut = true;
      rec.cut_normal = a;
      rec.cut_offset = gamma;
      ++out.cuts;
    } else {
      O.mark_processed(ts->id);
    }
    out.iterations = it;
    if (options.observer) options.observer(O, rec);
    out.log.push_back(std::move(rec));
  }
  out.vertices = O.vertex_points();
  out.lp_solves = backend.count();
  return out;
}

struct DualityReport {
  std::size_t primal_vertices = 0;
  std::size_t primal_facets = 0;
  std::size_t dual_vertices = 0;
  std::size_t dual_nonvertical_facets = 0;
  double min_phi = kInf;               // weak duality: should be >= 0
  double max_incidence_residual = 0.0; // |phi| on matched vertex/facet pairs
  std::vector<std::string> problems;

  bool passed() const { return problems.empty(); }
};

namespace detail {

/// Faces of {y : N y >= o} with generators `points` and `dirs` that are
/// facets: distinct tight sets whose homogenized generators have rank q.
/// When `skip_vertical` is set, rows whose last normal component vanishes are ignored.
inline std::size_t count_facets(const HPolyhedron& h, const std::vector<Vector>& points,
                                const std::vector<Vector>& dirs, bool skip_vertical, double tol) {
  const Eigen::Index q = h.dim();
  std::vector<std::vector<bool>> seen;
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    const Vector n = h.normals.row(i).transpose();
    const double scale = std::max(inf_norm(n), 1e-300);
    if (skip_vertical && std::abs(n[q - 1]) / scale <= 1e-9) continue;
    std::vector<bool> tight;
    std::vector<Vector> gens;
    for (const auto& p : points) {
      const bool on = std::abs(n.dot(p) - h.offsets[i]) <= tol * scale * scale_of(p);
      tight.push_back(on);
      if (on) {
        Vector g(q + 1);
        g << p, 1.0;
        gens.push_back(g);
      }
    }
    for (const auto& d : dirs) {
      const bool on = std::abs(n.dot(d)) <= tol * scale;
      tight.push_back(on);
      if (on) {
        Vector g(q + 1);
        g << d, 0.0;
        gens.push_back(g);
      }
    }
    if (gens.empty() || matrix_rank(columns_to_matrix(gens, q + 1), 1e-7) != q) continue;
    if (std::find(seen.begin(), seen.end(), tight) == seen.end()) seen.push_back(tight);
  }
  return seen.size();
}

}  // namespace detail

/// Checks the vertex/facet correspondence between the upper image and the
/// lower image, plus weak duality and incidence of matched pairs.
inline DualityReport geometric_duality_check(const ImagePair& images, double tol = 1e-6) {
  DualityReport rep;
  const Vector& c = images.c;
  const Eigen::Index q = c.size();
  rep.primal_vertices = images.primal_points.size();
  rep.dual_vertices = images.dual_points.size();
  Vector down = Vector::Zero(q);
  down[q - 1] = -1.0;
  // Tightness for facet detection is much stricter than the incidence
  // tolerance: nearby vertices would otherwise merge distinct facets.
  const double tight = std::min(tol, kStrictTol);
  rep.primal_facets = detail::count_facets(images.primal_hrep, images.primal_points, images.primal_dirs, false, tight);
  rep.dual_nonvertical_facets = detail::count_facets(images.dual_hrep, images.dual_points, {down}, true, tight);

  if (rep.primal_vertices != rep.dual_nonvertical_facets)
    rep.problems.push_back("vertices of upper image (" + std::to_string(rep.primal_vertices) +
                           ") != non-vertical facets of lower image (" +
                           std::to_string(rep.dual_nonvertical_facets) + ")");
  if (rep.primal_facets != rep.dual_vertices)
    rep.problems.push_back("facets of upper image (" + std::to_string(rep.primal_facets) +
                           ") != vertices of lower image (" + std::to_string(rep.dual_vertices) + ")");

  for (const auto& y : images.primal_points)
    for (const auto& ys : images.dual_points) rep.min_phi = std::min(rep.min_phi, coupling_phi(y, ys, c));
  if (rep.min_phi < -tol) rep.problems.push_back("weak duality violated: min phi = " + std::to_string(rep.min_phi));

  // Every primal vertex y is incident to the q dual vertices spanning the facet phi(y, .) = 0.
  for (std::size_t k = 0; k < images.primal_points.size(); ++k) {
    std::vector<double> r;
    for (const auto& ys : images.dual_points) r.push_back(std::abs(coupling_phi(images.primal_points[k], ys, c)));
    std::sort(r.begin(), r.end());
    if (r.size() < static_cast<std::size_t>(q)) {
      rep.problems.push_back("primal vertex " + std::to_string(k) + " has fewer than q incident dual vertices");
      continue;
    }
    rep.max_incidence_residual = std::max(rep.max_incidence_residual, r[static_cast<std::size_t>(q - 1)]);
    if (r[static_cast<std::size_t>(q - 1)] > tol)
      rep.problems.push_back("primal vertex " + std::to_string(k) + " unmatched (residual " +
                             std::to_string(r[static_cast<std::size_t>(q - 1)]) + ")");
  }
  // Every dual vertex touches at least one primal vertex.
  for (std::size_t k = 0; k < images.dual_points.size(); ++k) {
    double best = kInf;
    for (const auto& y : images.primal_points)
      best = std::min(best, std::abs(coupling_phi(y, images.dual_points[k], c)));
    rep.max_incidence_residual = std::max(rep.max_incidence_residual, best);
    if (best > tol)
      rep.problems.push_back("dual vertex " + std::to_string(k) + " unmatched (residual " + std::to_string(best) +
                             ")");
  }
  return rep;
}

}  // namespace qcp
