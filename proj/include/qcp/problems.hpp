#pragma once

// Problem families: linear multiplicative programs, concave quadratic
// programs, DC programs with one polyhedral component (both orientations),
// convex minimization over the boundary of a polytope, and the small worked
// examples used throughout the tests.

#include "qcp/lifting.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>

namespace qcp {

// ---------------------------------------------------------------------------
// Linear multiplicative programs

/// min prod_i (c_i^T x + d_i)  s.t.  A x >= b, l <= x <= u
struct LmpInstance {
  Matrix A;
  Vector b;
  Vector l;
  Vector u;
  Matrix C;  // rows c_i^T
  Vector d;
};

inline QcpProblem make_lmp(const LmpInstance& inst) {
  const Eigen::Index n = inst.A.cols();
  const Eigen::Index q = inst.C.rows();
  require(inst.C.cols() == n && inst.b.size() == inst.A.rows() && inst.l.size() == n && inst.u.size() == n &&
              inst.d.size() == q,
          ErrorKind::invalid_argument, "LMP: inconsistent dimensions");
  require((inst.l.array() <= inst.u.array()).all(), ErrorKind::invalid_argument, "LMP: l > u");

  std::vector<Vector> rows;
  std::vector<double> rhs;
  for (Eigen::Index i = 0; i < inst.A.rows(); ++i) {
    rows.push_back(inst.A.row(i).transpose());
    rhs.push_back(inst.b[i]);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (std::isfinite(inst.l[j])) {
      rows.push_back(Vector::Unit(n, j));
      rhs.push_back(inst.l[j]);
    }
    if (std::isfinite(inst.u[j])) {
      rows.push_back(-Vector::Unit(n, j));
      rhs.push_back(-inst.u[j]);
    }
  }
  QcpProblem p;
  p.vlp.P = inst.C;
  p.vlp.A = columns_to_matrix(rows, n).transpose();
  p.vlp.b = Eigen::Map<const Vector>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  p.vlp.cone = PolyCone::nonnegative_orthant(q);
  p.vlp.c = Vector::Ones(q);
  const Vector d = inst.d;
  p.f.description = "product";
  p.f.eval = [d](const Vector& y) {
    double prod = 1.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double v = y[i] + d[i];
      if (v < 0.0) return -kInf;
      prod *= v;
    }
    return prod;
  };
  return p;
}

/// Uniform [0, 10) from 53 random bits of a 64-bit Mersenne twister.
inline double uniform_0_10(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 10.0;
}

/// Random instance: A, b, then the c_i (row-major) uniform on [0, 10];
/// l = 0, u = 100, d = 0. Generator: std::mt19937_64 seeded with `seed`.
inline LmpInstance gen_lmp_random(int q, int m, int n, std::uint64_t seed) {
  require(q >= 1 && m >= 1 && n >= 1, ErrorKind::invalid_argument, "LMP generator needs q, m, n >= 1");
  std::mt19937_64 rng(seed);
  LmpInstance inst;
  inst.A = Matrix(m, n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) inst.A(i, j) = uniform_0_10(rng);
  inst.b = Vector(m);
  for (int i = 0; i < m; ++i) inst.b[i] = uniform_0_10(rng);
  inst.C = Matrix(q, n);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < n; ++j) inst.C(i, j) = uniform_0_10(rng);
  inst.l = Vector::Zero(n);
  inst.u = Vector::Constant(n, 100.0);
  inst.d = Vector::Zero(q);
  return inst;
}

// ---------------------------------------------------------------------------
// Concave quadratic programs

/// P_ij = floor(q sin((j-1) q + i)) with 1-based i, j.
inline Matrix sin_floor_matrix(int q, int n) {
  require(q >= 1 && n >= 1, ErrorKind::invalid_argument, "sin_floor_matrix needs q, n >= 1");
  Matrix P(q, n);
  for (int i = 1; i <= q; ++i)
    for (int j = 1; j <= n; ++j) P(i - 1, j - 1) = std::floor(q * std::sin(static_cast<double>((j - 1) * q + i)));
  return P;
}

/// Rows -e <= x <= e as A x >= b.
inline std::pair<Matrix, Vector> unit_box_rows(Eigen::Index n, double radius = 1.0) {
  Matrix A(2 * n, n);
  A << Matrix::Identity(n, n), -Matrix::Identity(n, n);
  return {A, Vector::Constant(2 * n, -radius)};
}

/// min -x^T P^T P x over the unit box; the cone is {0}, so solve_qcp lifts it.
inline QcpProblem make_cqp(int q, int n) {
  require(q >= 1 && q <= n, ErrorKind::invalid_argument, "CQP needs 1 <= q <= n");
  QcpProblem p;
  p.vlp.P = sin_floor_matrix(q, n);
  std::tie(p.vlp.A, p.vlp.b) = unit_box_rows(n);
  p.vlp.cone = PolyCone::trivial(q);
  p.f.description = "neg_squared_norm";
  p.f.eval = [](const Vector& y) { return -y.squaredNorm(); };
  return p;
}

/// Seeded variant: integer P entries drawn uniformly from [-q, q], the range
/// of the sin-floor matrix. Used for batches of distinct CQP instances.
inline QcpProblem make_cqp_seeded(int q, int n, std::uint64_t seed) {
  QcpProblem p = make_cqp(q, n);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> entry(-q, q);
  for (Eigen::Index j = 0; j < p.vlp.P.cols(); ++j)
    for (Eigen::Index i = 0; i < p.vlp.P.rows(); ++i) p.vlp.P(i, j) = entry(rng);
  return p;
}

// ---------------------------------------------------------------------------
// Worked examples

inline QcpProblem make_example_41() {
  Matrix M(6, 4);
  M << 1.2, 1.4, 0.4, 0.8,
      -0.7, 0.8, 0.8, 0.0,
       0.0, 1.2, 0.0, 0.4,
       2.8, -2.1, 0.5, 0.0,
       0.4, 2.1, -1.5, -0.2,
      -0.6, -1.3, 2.4, 0.5;
  Vector r(6);
  r << 6.8, 0.8, 2.1, 1.2, 1.4, 0.8;
  QcpProblem p;
  p.vlp.A = Matrix(10, 4);
  p.vlp.A << -M, Matrix::Identity(4, 4);
  p.vlp.b = Vector::Zero(10);
  p.vlp.b.head(6) = -r;
  p.vlp.P = Matrix(2, 4);
  p.vlp.P << 1, 0, 0, 0, 1, -0.5, 0.3, 1;
  Matrix Y(2, 2);
  Y << -1, 0, 0, 1;
  p.vlp.cone = PolyCone(Y, Y);
  p.vlp.c = Vector(2);
  p.vlp.c << -0.25, 1.0;
  p.f.description = "example41";
  p.f.eval = [](const Vector& y) { return -std::pow(std::abs(y[0]), 1.5) - 0.1 * (y[1] - 4.5) * (y[1] - 4.5); };
  return p;
}

/// min y1 - y2^2 with y = P x, -e <= x, x1 <= 1, x3 <= 1; cone = ray (1, 0).
inline QcpProblem make_nonsolid_example() {
  QcpProblem p;
  p.vlp.P = Matrix(2, 3);
  p.vlp.P << 1, 1, -1, 1, 0, 1;
  p.vlp.A = Matrix(5, 3);
  p.vlp.A << Matrix::Identity(3, 3), Matrix(2, 3);
  p.vlp.A.row(3) << -1, 0, 0;
  p.vlp.A.row(4) << 0, 0, -1;
  p.vlp.b = Vector(5);
  p.vlp.b << -1, -1, -1, -1, -1;
  Matrix Y(2, 1);
  Y << 1, 0;
  p.vlp.cone = PolyCone::from_generators(Y);
  p.f.description = "nonsolid";
  p.f.eval = [](const Vector& y) { return y[0] - y[1] * y[1]; };
  return p;
}

// ---------------------------------------------------------------------------
// DC programs  min_x g(x) - h(x)  with one polyhedral component

/// Epigraph form: min r - phi(x) over (x, r) in the polyhedron `epi`, where
/// `epi` is a P-representation over (x, r) (last column of epi.A is r).
struct DcInstance {
  PPolyhedron epi;
  std::function<double(const Vector&)> subtracted;  // convex phi
  bool dual_orientation = false;
  /// Maps the optimal x of the epigraph form to a solution of the original problem.
  std::function<Vector(const Vector&)> recover;
  std::string description;
};

/// QCP with decision vector (x, r, u), image (x, r), objective r - phi(x),
/// cone R_+ (0, ..., 0, 1). The cone is non-solid, so solve_qcp lifts it.
inline QcpProblem make_dc_primal(const DcInstance& dc) {
  dc.epi.validate();
  const Eigen::Index d = dc.epi.A.cols();  // dim x + 1
  const Eigen::Index k = dc.epi.B.cols();
  QcpProblem p;
  p.vlp.P = Matrix::Zero(d, d + k);
  p.vlp.P.leftCols(d).setIdentity();
  p.vlp.A = Matrix(dc.epi.A.rows(), d + k);
  p.vlp.A << dc.epi.A, dc.epi.B;
  p.vlp.b = dc.epi.b;
  p.vlp.cone = PolyCone::from_generators(Vector::Unit(d, d - 1));
  const auto phi = dc.subtracted;
  p.f.description = dc.description.empty() ? "dc" : dc.description;
  p.f.eval = [phi, d](const Vector& y) { return y[d - 1] - phi(y.head(d - 1)); };
  return p;
}

/// Value sup_x { y^T x - r : (x, r) in epi } and a maximizer x, by LP.
inline std::pair<double, Vector> polyhedral_conjugate_value(const PPolyhedron& epi, const Vector& y) {
  const Eigen::Index d = epi.A.cols(), k = epi.B.cols();
  LinearProgram lp = LinearProgram::free_variables(d + k);
  lp.objective.head(d - 1) = -y;
  lp.objective[d - 1] = 1.0;
  Matrix rows(epi.A.rows(), d + k);
  rows << epi.A, epi.B;
  lp.add_rows(rows, Sense::ge, epi.b);
  const LpSolution s = solve_lp(lp);
  if (s.status == LpStatus::unbounded) return {kInf, Vector()};
  detail::raise_for(s.status, "conjugate evaluation");
  return {-s.objective_value, s.x.head(d - 1)};
}

/// P-representation of epi h* from a P-representation of epi h over (x, r):
/// epi h* = {(y, s) : exists lambda >= 0, A_x^T lambda = -y, a^T lambda = 1,
///           B^T lambda = 0, s + b^T lambda >= 0}.
inline PPolyhedron polyhedral_conjugate(const PPolyhedron& epi) {
  epi.validate();
  const Eigen::Index d = epi.A.cols();  // dim + 1
  const Eigen::Index m = epi.A.rows(), k = epi.B.cols();
  require(d >= 2, ErrorKind::invalid_argument, "epigraph needs at least one x coordinate and r");
  {
    LinearProgram lp = LinearProgram::free_variables(d + k);
    Matrix rows(m, d + k);
    rows << epi.A, epi.B;
    lp.add_rows(rows, Sense::ge, epi.b);
    require(solve_lp(lp).status == LpStatus::optimal, ErrorKind::invalid_argument, "epigraph is empty");
  }
  const Eigen::Index dx = d - 1;
  const Matrix Ax = epi.A.leftCols(dx);
  const Vector a = epi.A.col(dx);
  const Eigen::Index rows = m + 2 * dx + 2 + 2 * k + 1;
  PPolyhedron out;
  out.A = Matrix::Zero(rows, d);
  out.B = Matrix::Zero(rows, m);
  out.b = Vector::Zero(rows);
  Eigen::Index r = 0;
  out.B.block(r, 0, m, m).setIdentity();
  r += m;
  out.A.block(r, 0, dx, dx).setIdentity();
  out.B.block(r, 0, dx, m) = Ax.transpose();
  r += dx;
  out.A.block(r, 0, dx, dx) = -Matrix::Identity(dx, dx);
  out.B.block(r, 0, dx, m) = -Ax.transpose();
  r += dx;
  out.B.row(r) = a.transpose();
  out.b[r++] = 1.0;
  out.B.row(r) = -a.transpose();
  out.b[r++] = -1.0;
  out.B.block(r, 0, k, m) = epi.B.transpose();
  r += k;
  out.B.block(r, 0, k, m) = -epi.B.transpose();
  r += k;
  out.A(r, dx) = 1.0;
  out.B.row(r) = epi.b.transpose();
  {
    LinearProgram lp = LinearProgram::free_variables(d + m);
    Matrix all(rows, d + m);
    all << out.A, out.B;
    lp.add_rows(all, Sense::ge, out.b);
    require(solve_lp(lp).status == LpStatus::optimal, ErrorKind::invalid_argument,
            "conjugate has empty domain: the function is improper");
  }
  return out;
}

/// Dual orientation: min s - phi*(y) over epi h*, for the DC program
/// min g - h with h polyhedral (epi_h) and phi* = g* supplied as a handle.
inline DcInstance make_dc_dual(const PPolyhedron& epi_h, std::function<double(const Vector&)> g_conjugate,
                               std::function<Vector(const Vector&)> recover, std::string description) {
  DcInstance dc;
  dc.epi = polyhedral_conjugate(epi_h);
  dc.subtracted = std::move(g_conjugate);
  dc.recover = std::move(recover);
  dc.dual_orientation = true;
  dc.description = std::move(description);
  return dc;
}

namespace detail {

/// P-representation builder: rows A x + B u >= b over (x, r) with k auxiliaries.
struct PrepBuilder {
  Eigen::Index nx, k;
  std::vector<Vector> A, B;
  std::vector<double> b;
  void row(Vector a, Vector bb, double rhs) {
    A.push_back(std::move(a));
    B.push_back(std::move(bb));
    b.push_back(rhs);
  }
  PPolyhedron build() const {
    PPolyhedron p;
    p.A = columns_to_matrix(A, nx).transpose();
    p.B = columns_to_matrix(B, k).transpose();
    p.b = Eigen::Map<const Vector>(b.data(), static_cast<Eigen::Index>(b.size()));
    return p;
  }
};

}  // namespace detail

/// epi of g(x) = |x1 - 1| + 200 sum_{i>=2} max(0, |x_{i-1}| - x_i) on -10 e <= x <= 10 e.
/// Auxiliaries: a >= |x1 - 1|, s_i >= |x_{i-1}|, t_i >= max(0, s_i - x_i).
inline PPolyhedron dc_chain_epi_g(int q) {
  const Eigen::Index d = q + 1, k = 1 + 2 * (q - 1);
  detail::PrepBuilder pb{d, k, {}, {}, {}};
  auto Z = [&](Eigen::Index n) { return Vector::Zero(n).eval(); };
  const Eigen::Index ia = 0;
  auto is = [&](int i) { return 1 + (i - 2); };           // s_i, i = 2..q
  auto it = [&](int i) { return 1 + (q - 1) + (i - 2); };  // t_i
  {
    Vector a = Z(d), b = Z(k);
    a[0] = -1; b[ia] = 1;
    pb.row(a, b, -1.0);  // a - (x1 - 1) >= 0  ->  -x1 + a >= -1
    a = Z(d); b = Z(k);
    a[0] = 1; b[ia] = 1;
    pb.row(a, b, 1.0);  // a + x1 - 1 >= 0
  }
  for (int i = 2; i <= q; ++i) {
    Vector a = Z(d), b = Z(k);
    a[i - 2] = -1; b[is(i)] = 1;
    pb.row(a, b, 0.0);
    a = Z(d); b = Z(k);
    a[i - 2] = 1; b[is(i)] = 1;
    pb.row(a, b, 0.0);
    a = Z(d); b = Z(k);
    b[it(i)] = 1;
    pb.row(a, b, 0.0);
    a = Z(d); b = Z(k);
    a[i - 1] = 1; b[it(i)] = 1; b[is(i)] = -1;
    pb.row(a, b, 0.0);  // t_i - s_i + x_i >= 0
  }
  {
    Vector a = Z(d), b = Z(k);
    a[q] = 1; b[ia] = -1;
    for (int i = 2; i <= q; ++i) b[it(i)] = -200.0;
    pb.row(a, b, 0.0);  // r >= a + 200 sum t_i
  }
  for (int j = 0; j < q; ++j) {
    Vector a = Z(d), b = Z(k);
    a[j] = 1;
    pb.row(a, b, -10.0);
    a = Z(d);
    a[j] = -1;
    pb.row(a, b, -10.0);
  }
  return pb.build();
}

/// h(x) = 100 sum_{i>=2} (|x_{i-1}| - x_i).
inline double dc_chain_h(const Vector& x) {
  double s = 0.0;
  for (Eigen::Index i = 1; i < x.size(); ++i) s += std::abs(x[i - 1]) - x[i];
  return 100.0 * s;
}

/// epi h with auxiliaries s_i >= |x_{i-1}|: r >= 100 sum (s_i - x_i).
inline PPolyhedron dc_chain_epi_h(int q) {
  const Eigen::Index d = q + 1, k = std::max(q - 1, 1);
  detail::PrepBuilder pb{d, k, {}, {}, {}};
  for (int i = 2; i <= q; ++i) {
    Vector a = Vector::Zero(d), b = Vector::Zero(k);
    a[i - 2] = -1; b[i - 2] = 1;
    pb.row(a, b, 0.0);
    a = Vector::Zero(d); b = Vector::Zero(k);
    a[i - 2] = 1; b[i - 2] = 1;
    pb.row(a, b, 0.0);
  }
  Vector a = Vector::Zero(d), b = Vector::Zero(k);
  a[q] = 1;
  for (int i = 2; i <= q; ++i) {
    b[i - 2] = -100.0;
    a[i - 1] += 100.0;
  }
  pb.row(a, b, 0.0);
  return pb.build();
}

/// The DC test problem  min g(x) - h(x)  over the box [-10, 10]^q; optimum 0 at e.
inline DcInstance make_dc_chain(int q, bool dual_orientation) {
  require(q >= 2, ErrorKind::invalid_argument, "DC example needs q >= 2");
  if (!dual_orientation) {
    DcInstance dc;
    dc.epi = dc_chain_epi_g(q);
    dc.subtracted = dc_chain_h;
    dc.recover = [](const Vector& x) { return x; };
    dc.description = "dc_chain(q=" + std::to_string(q) + ")";
    return dc;
  }
  const PPolyhedron epi_g = dc_chain_epi_g(q);
  return make_dc_dual(
      dc_chain_epi_h(q), [epi_g](const Vector& y) { return polyhedral_conjugate_value(epi_g, y).first; },
      [epi_g](const Vector& y) { return polyhedral_conjugate_value(epi_g, y).second; },
      "dc_chain*(q=" + std::to_string(q) + ")");
}

// ---------------------------------------------------------------------------
// Convex minimization over the boundary of a polytope

struct NegConjugateResult {
  double value = 0.0;  // min_{x in Q} x^T x - y^T x
  Vector x;
  int iterations = 0;
};

/// Minimizes x^T x - y^T x over the P-represented polytope Q by the
/// away-step Frank-Wolfe method with exact line search; stops when the
/// Frank-Wolfe duality gap drops below tol.
inline NegConjugateResult neg_conjugate_quadratic(const Vector& y, const PPolyhedron& Q, double tol = 1e-10,
                                                  int max_iterations = 10000) {
  Q.validate();
  const Eigen::Index q = Q.A.cols(), k = Q.B.cols();
  SimplexSolver solver;
  Matrix rows(Q.A.rows(), q + k);
  rows << Q.A, Q.B;
  auto lmo = [&](const Vector& g) {
    LinearProgram lp = LinearProgram::free_variables(q + k);
    lp.objective.head(q) = g;
    lp.add_rows(rows, Sense::ge, Q.b);
    const LpSolution s = solver.solve(lp);
    detail::raise_for(s.status, "linear minimization oracle");
    return Vector(s.x.head(q));
  };

  std::vector<Vector> atoms{lmo(-y)};
  std::vector<double> weight{1.0};
  Vector x = atoms[0];
  NegConjugateResult out;
  for (int it = 0; it < max_iterations; ++it) {
    out.iterations = it;
    const Vector g = 2.0 * x - y;
    const Vector s = lmo(g);
    const double gap = g.dot(x - s);
    if (gap <= tol * std::max(1.0, std::abs(x.squaredNorm() - y.dot(x)))) {
      out.value = x.squaredNorm() - y.dot(x);
      out.x = x;
      return out;
    }
    std::size_t away = 0;
    for (std::size_t a = 1; a < atoms.size(); ++a)
      if (g.dot(atoms[a]) > g.dot(atoms[away])) away = a;
    const double away_gap = g.dot(atoms[away] - x);
    Vector dir;
    double gmax;
    bool fw;
    if (gap >= away_gap || atoms.size() == 1) {
      dir = s - x;
      gmax = 1.0;
      fw = true;
    } else {
      dir = x - atoms[away];
      gmax = weight[away] / (1.0 - weight[away]);
      fw = false;
    }
    const double dd = dir.squaredNorm();
    if (dd == 0.0) break;
    const double gamma = std::clamp(-g.dot(dir) / (2.0 * dd), 0.0, gmax);
    x += gamma * dir;
    if (fw) {
      for (auto& wgt : weight) wgt *= (1.0 - gamma);
      std::size_t idx = atoms.size();
      for (std::size_t a = 0; a < atoms.size(); ++a)
        if (nearly_equal(atoms[a], s, 1e-12)) idx = a;
      if (idx == atoms.size()) {
        atoms.push_back(s);
        weight.push_back(gamma);
      } else {
        weight[idx] += gamma;
      }
    } else {
      for (auto& wgt : weight) wgt *= (1.0 + gamma);
      weight[away] -= gamma;
    }
    for (std::size_t a = atoms.size(); a-- > 0;) {
      if (weight[a] <= 1e-15) {
        atoms.erase(atoms.begin() + static_cast<std::ptrdiff_t>(a));
        weight.erase(weight.begin() + static_cast<std::ptrdiff_t>(a));
      }
    }
  }
  throw Error(ErrorKind::numerical, "Frank-Wolfe iteration cap reached before the gap tolerance");
}

/// Minimization of g over bd Q recast as min g - (h_c - c) over Q, where
/// epi h_c is the cone over Q x {c}, solved in the Toland-Singer dual
/// orientation. `neg_conjugate` returns (-g*(y), argmin) for the convex g.
/// Requires c > L * R with L a Lipschitz constant of g on Q and R >= max |x| on Q.
inline DcInstance make_boundary_problem(const PPolyhedron& Q,
                                        std::function<std::pair<double, Vector>(const Vector&)> neg_conjugate,
                                        double L, double R, double c) {
  Q.validate();
  require(L > 0.0 && R > 0.0, ErrorKind::invalid_argument, "Lipschitz constant and radius must be positive");
  if (!(c > L * R))
    throw Error(ErrorKind::invalid_argument, "penalty parameter c = " + std::to_string(c) +
                                                 " must exceed L*R = " + std::to_string(L * R));
  const Eigen::Index q = Q.A.cols(), k = Q.B.cols(), m = Q.A.rows();
  // epi (h_c - c): A x + B u - (b/c) r >= b,  r >= -c
  PPolyhedron epi;
  epi.A = Matrix::Zero(m + 1, q + 1);
  epi.B = Matrix::Zero(m + 1, k);
  epi.b = Vector(m + 1);
  epi.A.topLeftCorner(m, q) = Q.A;
  epi.A.block(0, q, m, 1) = -Q.b / c;
  epi.B.topRows(m) = Q.B;
  epi.b.head(m) = Q.b;
  epi.A(m, q) = 1.0;
  epi.b[m] = -c;
  return make_dc_dual(
      epi, [neg_conjugate](const Vector& y) { return -neg_conjugate(y).first; },
      [neg_conjugate](const Vector& y) { return neg_conjugate(y).second; }, "boundary");
}

/// h_c(x) = min { r : (x, r) in cone(Q x {c}) }, evaluated by LP (for tests and diagnostics).
inline double gauge_penalty(const PPolyhedron& Q, double c, const Vector& x) {
  const Eigen::Index q = Q.A.cols(), k = Q.B.cols(), m = Q.A.rows();
  LinearProgram lp = LinearProgram::free_variables(1 + k);
  lp.objective[0] = 1.0;
  lp.lower[0] = 0.0;
  Matrix rows(m, 1 + k);
  rows << -Q.b / c, Q.B;
  lp.add_rows(rows, Sense::ge, -Q.A * x);
  const LpSolution s = solve_lp(lp);
  if (s.status == LpStatus::infeasible) return kInf;
  detail::raise_for(s.status, "gauge evaluation");
  (void)q;
  return s.objective_value;
}

/// Q = P[S] with S = [-1, 1]^m and P the sin-floor matrix, as a P-representation
/// {x : exists u, x = P u, -e <= u <= e}.
inline PPolyhedron sin_floor_polytope(int q, int m) {
  const Matrix P = sin_floor_matrix(q, m);
  PPolyhedron Q;
  Q.A = Matrix::Zero(2 * q + 2 * m, q);
  Q.B = Matrix::Zero(2 * q + 2 * m, m);
  Q.b = Vector::Zero(2 * q + 2 * m);
  Q.A.topRows(q).setIdentity();
  Q.B.topRows(q) = -P;
  Q.A.middleRows(q, q) = -Matrix::Identity(q, q);
  Q.B.middleRows(q, q) = P;
  Q.B.middleRows(2 * q, m).setIdentity();
  Q.B.bottomRows(m) = -Matrix::Identity(m, m);
  Q.b.tail(2 * m).setConstant(-1.0);
  return Q;
}

struct BoundaryInstance {
  DcInstance dc;
  PPolyhedron Q;
  Vector r;  // row sums of |P|
  double L = 0.0, R = 0.0, c = 0.0;
};

/// min x^T x over bd P[S] with c = 2|r|^2 + 1, L = 2|r|, R = |r|; `c_override`
/// replaces the penalty parameter (used to exercise the guard).
inline BoundaryInstance make_boundary_example(int q, int m, std::optional<double> c_override = std::nullopt) {
  require(q >= 1 && q <= m, ErrorKind::invalid_argument, "boundary example needs 1 <= q <= m");
  BoundaryInstance bi;
  bi.Q = sin_floor_polytope(q, m);
  bi.r = sin_floor_matrix(q, m).cwiseAbs().rowwise().sum();
  bi.R = bi.r.norm();
  bi.L = 2.0 * bi.r.norm();
  bi.c = c_override ? *c_override : 2.0 * bi.r.squaredNorm() + 1.0;
  const PPolyhedron Q = bi.Q;
  bi.dc = make_boundary_problem(
      bi.Q,
      [Q](const Vector& y) {
        const auto r = neg_conjugate_quadratic(y, Q);
        return std::make_pair(r.value, r.x);
      },
      bi.L, bi.R, bi.c);
  return bi;
}

}  // namespace qcp
