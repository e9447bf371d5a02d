#include "qcp/problems.hpp"
#include "qcp/scalarization.hpp"
#include "qcp/vlp_solver.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qcp;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

// P = I, A = I, b = 0, C = R^2_+, c = (1, 1): the upper image is R^2_+.
VlpProblem tiny() {
  VlpProblem v;
  v.P = Matrix::Identity(2, 2);
  v.A = Matrix::Identity(2, 2);
  v.b = Vector::Zero(2);
  v.cone = PolyCone::nonnegative_orthant(2);
  v.c = v2(1, 1);
  return v;
}

}  // namespace

TEST(Coupling, ZeroDualPointGivesLastCoordinate) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const Vector y = oracle::uniform_vector(rng, 3, -5, 5);
    const Vector c = oracle::uniform_vector(rng, 3, -1, 1);
    EXPECT_DOUBLE_EQ(coupling_phi(y, Vector::Zero(3), c), y[2]);
  }
}

TEST(Coupling, HandEvaluated) {
  EXPECT_DOUBLE_EQ(coupling_phi(v2(1, 1), v2(2, 3), v2(0, 1)), 0.0);
  // 2*3 + 4*(1 - 0.5*3) - 1 = 3
  EXPECT_DOUBLE_EQ(coupling_phi(v2(2, 4), v2(3, 1), v2(0.5, 1)), 3.0);
}

TEST(Coupling, DualCutIsThePhiHalfspace) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 50; ++k) {
    const Vector y = oracle::uniform_vector(rng, 4, -3, 3);
    Vector c = oracle::uniform_vector(rng, 4, -1, 1);
    c[3] = 1;
    const Vector ys = oracle::uniform_vector(rng, 4, -3, 3);
    const auto [a, gamma] = dual_cut(y, c);
    EXPECT_NEAR(a.dot(ys) - gamma, coupling_phi(y, ys, c), 1e-12);
  }
}

TEST(Omega, Formula) {
  const Vector c = v2(-0.25, 1);
  EXPECT_TRUE(omega(Vector::Zero(2), c).isApprox(v2(0, 1)));
  const Vector w = omega(v2(1, 5), c);
  EXPECT_DOUBLE_EQ(w[0], 1.0);
  EXPECT_DOUBLE_EQ(w[1], 1.25);
  EXPECT_EQ(omega(v2(1, -7), c), w);  // independent of t*_q
}

TEST(Omega, DeltaMapsIntoDualCone) {
  // Delta for C = R^2_+ and c = (1, 1): 0 <= t*_1 <= 1.
  const Vector c = v2(1, 1);
  for (double t1 = 0.0; t1 <= 1.0; t1 += 0.125) {
    const Vector w = omega(v2(t1, 42.0), c);
    EXPECT_GE(w.minCoeff(), -1e-15);
  }
}

TEST(P2, TinyBoundaryPoint) {
  const VlpProblem v = tiny();
  const P2Result r = solve_p2_d2(v, v2(0, 0));
  EXPECT_NEAR(r.z, 0.0, 1e-9);
  EXPECT_LE(inf_norm(r.x), 1e-9);
  EXPECT_NEAR(v.c.dot(r.w), 1.0, 1e-9);
}

TEST(P2, TinyOutsidePoint) {
  const VlpProblem v = tiny();
  const Vector t = v2(-1, 2);
  const P2Result r = solve_p2_d2(v, t);
  // the nearest boundary point along c is (0, 3)
  EXPECT_NEAR(r.z, 1.0, 1e-9);
  const Vector s = t + r.z * v.c;
  EXPECT_NEAR(r.w.dot(s), r.offset, 1e-9);
  EXPECT_TRUE(oracle::in_upper_image(v, s));
}

TEST(P2, ExampleBoundaryPointFromFirstVertex) {
  const VlpProblem v = make_example_41().vlp;
  const OuterApprox O0 = OuterApprox::from_hrep(HPolyhedron(v.cone.Z.transpose(), check_boundedness(v)));
  const auto verts = O0.vertex_points();
  ASSERT_EQ(verts.size(), 1U);
  EXPECT_NEAR(verts[0][0], 1.177, 5e-4);
  EXPECT_NEAR(verts[0][1], -0.3444, 5e-4);
  const P2Result r = solve_p2_d2(v, verts[0]);
  EXPECT_GT(r.z, 0.0);
  const Vector s = verts[0] + r.z * v.c;
  // reference coordinates are approximate (read off a plot); the exact point sits on the
  // edge from (0, -0.3444) to (1.0838, 0.8040)
  EXPECT_NEAR(s[0], 0.935, 1e-2);
  EXPECT_NEAR(s[1], 0.634, 1e-2);
  EXPECT_TRUE(oracle::in_upper_image(v, s));
  EXPECT_FALSE(oracle::in_upper_image(v, s - 1e-4 * v.c, 1e-9));
}

TEST(P2, SupportingHalfspaceAndSignTest) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const VlpProblem v = make_lmp(gen_lmp_random(2, 10, 8, seed)).vlp;
    std::mt19937_64 rng(seed + 100);
    // sample targets around the ideal point
    const Vector lo(v2(oracle::support_value(v, v2(1, 0)), oracle::support_value(v, v2(0, 1))));
    for (int k = 0; k < 15; ++k) {
      const Vector t = lo + oracle::uniform_vector(rng, 2, -5, 60);
      const P2Result r = solve_p2_d2(v, t);
      EXPECT_NEAR(v.c.dot(r.w), 1.0, 1e-9);
      EXPECT_GE(r.w.minCoeff(), -1e-9);  // w in C+
      // offset is the support value of the upper image in direction w
      EXPECT_NEAR(r.offset, oracle::support_value(v, r.w), 1e-7 * scale_of(t));
      const Vector s = t + r.z * v.c;
      EXPECT_NEAR(r.w.dot(s), r.offset, 1e-7 * scale_of(s));
      EXPECT_TRUE((v.P * r.x - s).norm() <= 1e-6 * scale_of(s) || oracle::in_upper_image(v, s));
      const bool outside = !oracle::in_upper_image(v, t, 1e-9);
      if (std::abs(r.z) > 1e-6) EXPECT_EQ(r.z > 0, outside) << "seed " << seed << " k " << k;
    }
  }
}

TEST(P1, TinyValue) {
  const VlpProblem v = tiny();
  const P1Result r = solve_p1_d1(v, omega(v2(0.5, 0), v.c));
  EXPECT_NEAR(r.value, 0.0, 1e-12);
  EXPECT_LE(inf_norm(r.x), 1e-9);
}

TEST(P1, TinySignTestMatchesHandDual) {
  // lower image of the tiny instance: {0 <= y1* <= 1, y2* <= 0}
  const VlpProblem v = tiny();
  for (double t1 : {0.0, 0.3, 0.9, 1.0}) {
    for (double t2 : {-2.0, -0.5, 0.25, 1.5}) {
      const P1Result r = solve_p1_d1(v, omega(v2(t1, t2), v.c));
      const bool in_dual_image = r.value >= t2 - 1e-12;
      EXPECT_EQ(in_dual_image, t2 <= 0.0) << t1 << "," << t2;
    }
  }
}

TEST(P1, ExampleInitialDualPoint) {
  const VlpProblem v = make_example_41().vlp;
  const Vector w = initial_dual_weight(v);
  EXPECT_NEAR(v.c.dot(w), 1.0, 1e-12);
  const P1Result r = solve_p1_d1(v, w);
  Vector ds = w;
  ds[1] = r.value;
  EXPECT_TRUE(omega(ds, v.c).isApprox(w));  // omega of the dual point recovers w
  // first dual outer set: Delta intersected with the first cut
  const auto verts = initial_dual_approx(v, v.P * r.x).vertex_points();
  EXPECT_TRUE(oracle::same_point_set(verts, {v2(0, -0.344444444444), v2(-4, 0)}, 1e-9));
  // cutting at (-4, 0) yields the dual point (-4, -4.707)
  const P1Result r2 = solve_p1_d1(v, omega(v2(-4, 0), v.c));
  EXPECT_NEAR(r2.value, -4.707, 5e-4);
  EXPECT_LT(r2.value, 0.0);  // sign test: (-4, 0) is outside the lower image
}

TEST(P1, WeakDualityAgainstPrimalSamples) {
  const VlpProblem v = make_lmp(gen_lmp_random(3, 12, 9, 7)).vlp;
  std::mt19937_64 rng(9);
  for (int k = 0; k < 20; ++k) {
    Vector ts = oracle::uniform_vector(rng, 3, 0, 1);
    ts /= ts.sum() + 0.5;  // omega(ts) stays in R^3_+
    const Vector w = omega(ts, v.c);
    ASSERT_GE(w.minCoeff(), 0.0);
    const P1Result r = solve_p1_d1(v, w);
    Vector dual_point = ts;
    dual_point[2] = r.value;
    // phi(Px, y*) >= 0 for feasible x
    for (int j = 0; j < 5; ++j) {
      const Vector wj = oracle::uniform_vector(rng, 3, 0.1, 1);
      const Vector y = v.P * solve_p1_d1(v, wj).x;
      EXPECT_GE(coupling_phi(y, dual_point, v.c), -1e-7 * scale_of(y));
    }
  }
}

TEST(Boundedness, ViolatedAssumptionIsReported) {
  VlpProblem v = tiny();
  v.P = -Matrix::Identity(2, 2);  // P[S] = -R^2_+ is not C-bounded
  try {
    check_boundedness(v);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::assumption_violated);
  }
}

TEST(Boundedness, InfeasibleIsReported) {
  VlpProblem v = tiny();
  v.A = Matrix(2, 2);
  v.A << 1, 0, -1, 0;
  v.b = v2(1, 0);  // x1 >= 1 and x1 <= 0
  try {
    check_boundedness(v);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::infeasible);
  }
}

TEST(Validate, RejectsBadInteriorPointAndCones) {
  VlpProblem v = tiny();
  v.c = v2(1, 2);
  EXPECT_THROW(v.validate(), Error);
  v.c = v2(-1, 1);
  EXPECT_THROW(v.validate(), Error);
  v = tiny();
  Matrix Y(2, 1);
  Y << 1, 0;
  v.cone = PolyCone::from_generators(Y);
  try {
    v.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_solid_cone);
  }
}

TEST(CountingBackend, CountsSolves) {
  SimplexSolver inner;
  CountingBackend b(inner);
  const VlpProblem v = tiny();
  solve_p2_d2(v, v2(1, 1), b);
  solve_p1_d1(v, v2(0.5, 0.5), b);
  EXPECT_EQ(b.count(), 2);
}
