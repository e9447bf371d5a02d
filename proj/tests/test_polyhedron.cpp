#include "qcp/polyhedron.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace qcp;
using qcp::oracle::contains_point;
using qcp::oracle::same_point_set;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

HPolyhedron box(Eigen::Index q, double lo, double hi) {
  Matrix N(2 * q, q);
  N << Matrix::Identity(q, q), -Matrix::Identity(q, q);
  Vector o(2 * q);
  o << Vector::Constant(q, lo), Vector::Constant(q, -hi);
  return HPolyhedron(N, o);
}

}  // namespace

TEST(Polyhedron, UnitSquareCut) {
  auto approx = OuterApprox::from_hrep(box(2, 0.0, 1.0));
  EXPECT_EQ(approx.vertex_count(), 4U);
  const auto report = approx.cut(v2(-1, -1), -1.5);
  EXPECT_EQ(report.removed, 1U);
  EXPECT_EQ(report.added, 2U);
  const auto pts = approx.vertex_points();
  ASSERT_EQ(pts.size(), 5U);
  EXPECT_TRUE(contains_point(pts, v2(0.5, 1), 1e-12));
  EXPECT_TRUE(contains_point(pts, v2(1, 0.5), 1e-12));
  EXPECT_EQ(approx.hrep().rows(), 5);
}

TEST(Polyhedron, DegenerateCutKeepsVertices) {
  auto approx = OuterApprox::from_hrep(box(2, 0.0, 1.0));
  const auto before = approx.vertex_points();
  const auto report = approx.cut(v2(1, 1), -10.0);
  EXPECT_EQ(report.removed, 0U);
  EXPECT_TRUE(same_point_set(before, approx.vertex_points()));
  EXPECT_EQ(approx.hrep().rows(), 5);
}

TEST(Polyhedron, EmptyingCutThrowsAndKeepsState) {
  auto approx = OuterApprox::from_hrep(box(2, 0.0, 1.0));
  EXPECT_THROW(approx.cut(v2(1, 1), 5.0), Error);
  EXPECT_EQ(approx.vertex_count(), 4U);
  EXPECT_EQ(approx.hrep().rows(), 4);
}

TEST(Polyhedron, DdConvertUnbounded) {
  Matrix N(3, 2);
  N << 1, 0, 0, 1, 1, 1;
  Vector o(3);
  o << 0, 0, 1;
  const auto v = dd_convert(HPolyhedron(N, o));
  EXPECT_TRUE(same_point_set(v.points, {v2(1, 0), v2(0, 1)}));
  EXPECT_TRUE(same_point_set(v.directions, {v2(1, 0), v2(0, 1)}));
}

TEST(Polyhedron, DdConvertBox) {
  const auto v = dd_convert(box(2, -1.0, 1.0));
  EXPECT_EQ(v.points.size(), 4U);
  EXPECT_TRUE(v.directions.empty());
}

TEST(Polyhedron, DdConvertEmptyThrows) {
  Matrix N(2, 1);
  N << 1, -1;
  Vector o(2);
  o << 1, 0;  // y >= 1, y <= 0
  try {
    dd_convert(HPolyhedron(N, o));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::empty_polyhedron);
  }
}

TEST(Polyhedron, LowerImageStartRegion) {
  // Delta for C = R^2_+, c = (1,1): rows from the generators e1, e2 of C,
  // i.e. y*_1 >= 0 and 1 - y*_1 >= 0, then a first cut y*_2 <= t.
  Matrix N(2, 2);
  N << 1, 0, -1, 0;
  Vector o(2);
  o << 0, -1;
  Matrix N2(3, 2);
  N2 << N, Matrix(v2(0, -1).transpose());
  Vector o2(3);
  o2 << o, -0.5;
  const auto v = dd_convert(HPolyhedron(N2, o2));
  EXPECT_TRUE(same_point_set(v.points, {v2(0, 0.5), v2(1, 0.5)}));
  EXPECT_TRUE(same_point_set(v.directions, {v2(0, -1)}));
}

TEST(Polyhedron, RecessionCones) {
  const auto boxcone = recession_cone(box(2, 0, 1));
  EXPECT_EQ(boxcone.Y.cols(), 0);

  Matrix N(2, 2);
  N << 0, 1, -1, 0;
  Vector o(2);
  o << -0.3444, -1.177;
  const auto c = recession_cone(HPolyhedron(N, o));
  std::vector<Vector> gens;
  for (Eigen::Index j = 0; j < c.Y.cols(); ++j) gens.push_back(c.Y.col(j));
  EXPECT_TRUE(same_point_set(gens, {v2(-1, 0), v2(0, 1)}, 1e-12));

  Matrix H(1, 2);
  H << 1, 0;
  const auto half = recession_cone(HPolyhedron(H, Vector::Zero(1)));
  EXPECT_TRUE(half.is_solid());
  EXPECT_FALSE(half.is_pointed());
  EXPECT_TRUE(half.contains(v2(0, -5)));
  EXPECT_FALSE(half.contains(v2(-1, 0)));
  EXPECT_TRUE(half.is_consistent());
}

TEST(Polyhedron, InteriorPoints) {
  const Vector c = cone_interior_point(PolyCone::nonnegative_orthant(2));
  EXPECT_TRUE(c.isApprox(v2(1, 1)));

  Matrix Y(2, 2);
  Y << -1, 0, 0, 1;
  const auto cone = PolyCone::from_generators(Y);
  const Vector c2 = cone_interior_point(cone);
  EXPECT_LT(c2[0], 0.0);
  EXPECT_DOUBLE_EQ(c2[1], 1.0);
  EXPECT_TRUE(is_interior(cone, c2));

  const auto ray = PolyCone::from_generators(Matrix(v2(0, 1)));
  try {
    cone_interior_point(ray);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_solid_cone);
  }
}

TEST(Polyhedron, ConeGeneratorsAndDual) {
  const auto trivial = PolyCone::trivial(3);
  EXPECT_TRUE(trivial.is_pointed());
  EXPECT_FALSE(trivial.is_solid());
  const auto whole = positive_dual(trivial);
  EXPECT_EQ(matrix_rank(whole.Y), 3);
  EXPECT_EQ(whole.Z.cols(), 0);

  const auto orth = positive_dual(PolyCone::nonnegative_orthant(2));
  EXPECT_TRUE(orth.Y.isApprox(Matrix::Identity(2, 2)));

  // Positive dual by definition, checked by sampling.
  Matrix Y(2, 2);
  Y << -1, 0, 0, 1;
  const auto cone = PolyCone::from_generators(Y);
  const auto dual = positive_dual(cone);
  std::mt19937_64 rng(11);
  for (int k = 0; k < 1000; ++k) {
    const Vector s = oracle::uniform_vector(rng, 2, -1, 1);
    const bool by_definition = (Y.transpose() * s).minCoeff() >= 0.0;
    EXPECT_EQ(dual.contains(s, 0.0), by_definition);
  }
}

TEST(Polyhedron, ConeFormsAgreeAndDualIsInvolution) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index q = 2 + trial % 3;
    // Pointed solid cone: random generators inside the positive orthant, plus the unit vectors.
    Matrix Y(q, q + 2);
    Y << Matrix::Identity(q, q), Matrix::Random(q, 2).cwiseAbs();
    Y.col(q) += oracle::uniform_vector(rng, q, -0.5, 0.0);
    const auto cone = PolyCone::from_generators(Y);
    ASSERT_TRUE(cone.is_consistent());
    ASSERT_TRUE(cone.is_pointed());
    const auto back = positive_dual(positive_dual(cone));
    for (int k = 0; k < 200; ++k) {
      const Vector s = oracle::uniform_vector(rng, q, -1, 1);
      const bool via_z = cone.contains(s, 1e-9);
      const bool via_y = oracle::in_generated_cone(cone.Y, s, 1e-9);
      if (std::abs((cone.Z.transpose() * s).minCoeff()) > 1e-6) EXPECT_EQ(via_z, via_y);
      EXPECT_EQ(back.contains(s, 1e-9), via_z);
    }
  }
}

TEST(Polyhedron, RoundTripMembership) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index q = 2 + trial % 3;
    const Eigen::Index m = q + 1 + trial % (11 - q - 1 > 0 ? 10 - q : 1);
    // Random polyhedron containing a ball around 0 (so it is nonempty), made
    // pointed by a box.
    Matrix N(m + 2 * q, q);
    Vector o(m + 2 * q);
    for (Eigen::Index i = 0; i < m; ++i) {
      N.row(i) = oracle::uniform_vector(rng, q, -1, 1).transpose();
      o[i] = -std::uniform_real_distribution<>(0.2, 1.0)(rng);
    }
    N.bottomRows(2 * q) << Matrix::Identity(q, q), -Matrix::Identity(q, q);
    o.tail(2 * q).setConstant(-2.0);
    const HPolyhedron h(N, o);
    const auto v = dd_convert(h);
    EXPECT_TRUE(same_point_set(v.points, oracle::brute_force_vertices(h), 1e-7));
    for (int k = 0; k < 50; ++k) {
      const Vector y = oracle::uniform_vector(rng, q, -2.5, 2.5);
      const double margin = (N * y - o).minCoeff();
      if (std::abs(margin) < 1e-5) continue;
      EXPECT_EQ(oracle::in_hull(v, y, 1e-9), margin > 0.0);
    }
  }
}

TEST(Polyhedron, IncrementalMatchesFromScratch) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index q = 2 + trial % 3;
    auto approx = OuterApprox::from_hrep(box(q, -1.0, 1.0));
    const int cuts = 1 + trial % 15;
    for (int k = 0; k < cuts; ++k) {
      Vector w = oracle::uniform_vector(rng, q, -1, 1);
      const double gamma = -std::uniform_real_distribution<>(0.1, 0.9)(rng) * w.cwiseAbs().sum();
      approx.cut(w, gamma);
    }
    const auto fresh = dd_convert(approx.hrep());
    EXPECT_TRUE(same_point_set(approx.vertex_points(), fresh.points, 1e-7));
    EXPECT_TRUE(same_point_set(approx.vertex_points(), oracle::brute_force_vertices(approx.hrep()), 1e-7));
  }
}

TEST(Polyhedron, UnboundedIncrementalMatchesBruteForce) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index q = 2 + trial % 3;
    HPolyhedron h(Matrix::Identity(q, q), Vector::Zero(q));  // orthant
    auto approx = OuterApprox::from_hrep(h);
    for (int k = 0; k < 1 + trial % 10; ++k) {
      const Vector w = oracle::uniform_vector(rng, q, 0.1, 1.0);
      approx.cut(w, std::uniform_real_distribution<>(0.5, 2.0)(rng));
    }
    EXPECT_TRUE(same_point_set(approx.vertex_points(), oracle::brute_force_vertices(approx.hrep()), 1e-7));
    for (const auto& d : approx.directions()) EXPECT_GE(d.minCoeff(), -1e-12);
  }
}
