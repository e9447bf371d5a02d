#include "qcp/lifting.hpp"
#include "qcp/problems.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace qcp;
using oracle::contains_point;

namespace {

Vector v2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

QcpProblem tiny_constant(double value) {
  QcpProblem p;
  p.vlp.P = Matrix::Identity(2, 2);
  p.vlp.A = Matrix::Identity(2, 2);
  p.vlp.b = Vector::Zero(2);
  p.vlp.cone = PolyCone::nonnegative_orthant(2);
  p.vlp.c = v2(1, 1);
  p.f.eval = [value](const Vector&) { return value; };
  return p;
}

/// min of f over the vertices of the upper image, enumerated by the plain Benson algorithm.
double oracle_value(const QcpProblem& p) {
  const PrimalImage img = benson_primal(p.vlp, initial_outer_approx(p.vlp));
  double best = kInf;
  for (const auto& y : img.vertices) best = std::min(best, p.f(y));
  return best;
}

void expect_valid_result(const QcpProblem& p, const QcpResult& r) {
  EXPECT_TRUE(p.vlp.feasible(r.x));
  EXPECT_LE(inf_norm(p.vlp.P * r.x - r.y), 1e-6 * scale_of(r.y));
  EXPECT_EQ(r.value, p.f(r.y));
  // the returned image point sits on the boundary of the upper image
  EXPECT_TRUE(oracle::in_upper_image(p.vlp, r.y));
  EXPECT_FALSE(oracle::in_upper_image(p.vlp, r.y - 1e-5 * scale_of(r.y) * p.vlp.c, 1e-10));
}

}  // namespace

TEST(VertexArgmin, Examples) {
  const QcpProblem lmp = make_lmp(gen_lmp_random(2, 3, 3, 1));
  EXPECT_EQ(vertex_argmin_f(lmp.f, {v2(1, 1), v2(2, 0.1)}), v2(2, 0.1));
  // -inf (outside the domain) is minimal
  EXPECT_EQ(vertex_argmin_f(lmp.f, {v2(1, 1), v2(-1, 3), v2(0.1, 0.1)}), v2(-1, 3));
  // ties: lexicographically smallest
  Objective flat{[](const Vector&) { return 2.0; }, "flat"};
  EXPECT_EQ(vertex_argmin_f(flat, {v2(1, 0), v2(0, 5), v2(0, 4)}), v2(0, 4));
}

TEST(VertexArgmin, ContractViolations) {
  Objective inf{[](const Vector&) { return kInf; }, "inf"};
  Objective nan{[](const Vector&) { return std::nan(""); }, "nan"};
  try {
    vertex_argmin_f(inf, {v2(0, 0)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::contract);
  }
  try {
    vertex_argmin_f(nan, {v2(0, 0)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::contract);
  }
  EXPECT_THROW(vertex_argmin_f(inf, {}), Error);
}

TEST(RecoverPreimage, KnownPoint) {
  const VlpProblem v = make_lmp(gen_lmp_random(3, 10, 8, 4)).vlp;
  const Vector x0 = solve_p1_d1(v, Vector::Ones(3) / 3).x;
  const Vector t = v.P * x0;
  const Vector x = recover_preimage(v, t);
  EXPECT_TRUE(v.feasible(x));
  EXPECT_LE(inf_norm(v.P * x - t), 1e-6 * scale_of(t));
}

TEST(RecoverPreimage, ExampleSolutionPoint) {
  const VlpProblem v = make_example_41().vlp;
  const PrimalImage img = benson_primal(v, initial_outer_approx(v));
  const Vector t = img.vertices[vertex_argmin_index(make_example_41().f, img.vertices)];
  const Vector x = recover_preimage(v, t);
  EXPECT_TRUE(v.feasible(x));
  EXPECT_LE(inf_norm(v.P * x - t), 1e-6);
}

TEST(RecoverPreimage, OutsideImageIsAnError) {
  const VlpProblem v = make_example_41().vlp;
  try {
    recover_preimage(v, v2(-10, -10));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::infeasible);
  }
}

TEST(PrimalQcp, Example) {
  const QcpProblem p = make_example_41();
  const QcpResult r = solve_primal_qcp(p);
  EXPECT_NEAR(r.value, -2.494, 5e-4);
  EXPECT_NEAR(r.y[0], 1.084, 5e-4);
  EXPECT_NEAR(r.y[1], 0.804, 5e-4);
  expect_valid_result(p, r);
  // at termination the selected vertex is the image
  EXPECT_LE(inf_norm(r.history.back().t - r.y), 1e-6);
}

TEST(PrimalQcp, ConstantObjective) {
  const QcpProblem p = tiny_constant(3.5);
  const QcpResult r = solve_primal_qcp(p);
  EXPECT_EQ(r.value, 3.5);
  EXPECT_EQ(r.iterations, 1);
  expect_valid_result(p, r);
}

TEST(DualQcp, ExampleWithGivenInteriorPoint) {
  QcpProblem p = make_example_41();
  p.vlp.c = v2(-0.25, 1);
  const QcpResult r = solve_dual_qcp(p, DualRule::min_phi);
  EXPECT_EQ(r.iterations, 4);
  EXPECT_NEAR(r.y[0], 1.084, 5e-4);
  EXPECT_NEAR(r.y[1], 0.804, 5e-4);
  expect_valid_result(p, r);
  const QcpResult se = solve_dual_qcp(p, DualRule::first_violating);
  EXPECT_NEAR(se.value, r.value, 1e-9);
}

TEST(DualQcp, ConstantObjective) {
  const QcpProblem p = tiny_constant(-1.0);
  for (DualRule rule : {DualRule::min_phi, DualRule::first_violating}) {
    const QcpResult r = solve_dual_qcp(p, rule);
    EXPECT_EQ(r.value, -1.0);
    expect_valid_result(p, r);
  }
}

TEST(QcpOracle, RandomLmpAllAlgorithms) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const QcpProblem p = make_lmp(gen_lmp_random(2, 20, 30, seed));
    const double want = oracle_value(p);
    for (Algorithm alg : {Algorithm::primal, Algorithm::dual, Algorithm::dual_se}) {
      const QcpResult r = solve_qcp(p, alg);
      EXPECT_NEAR(r.value, want, 1e-6 * std::max(1.0, std::abs(want))) << to_string(alg) << " seed " << seed;
      expect_valid_result(p, r);
    }
  }
}

TEST(QcpInvariants, LowerBoundIsMonotone) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const QcpProblem p = make_lmp(gen_lmp_random(3, 15, 12, seed));
    for (Algorithm alg : {Algorithm::primal, Algorithm::dual, Algorithm::dual_se}) {
      const QcpResult r = solve_qcp(p, alg);
      double prev = -kInf;
      for (const auto& rec : r.history) {
        EXPECT_GE(rec.lower_bound, prev - 1e-9 * std::max(1.0, std::abs(prev)))
            << to_string(alg) << " seed " << seed << " iteration " << rec.iteration;
        EXPECT_LE(rec.lower_bound, r.value + 1e-9 * std::max(1.0, std::abs(r.value)));
        prev = std::max(prev, rec.lower_bound);
      }
    }
  }
}

TEST(QcpInvariants, NoVertexHandedToTheLpTwice) {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const QcpProblem p = make_lmp(gen_lmp_random(3, 15, 12, seed));
    const QcpResult primal = solve_qcp(p, Algorithm::primal);
    std::vector<Vector> seen;
    for (const auto& rec : primal.history) {
      EXPECT_FALSE(contains_point(seen, rec.t, 1e-12));
      seen.push_back(rec.t);
    }
    for (Algorithm alg : {Algorithm::dual, Algorithm::dual_se}) {
      const QcpResult dual = solve_qcp(p, alg);
      std::vector<Vector> dseen;
      for (const auto& rec : dual.history) {
        EXPECT_FALSE(contains_point(dseen, rec.t_star, 1e-12));
        dseen.push_back(rec.t_star);
      }
    }
  }
}

TEST(QcpInvariants, ResultIsAVertexOfTheUpperImage) {
  const QcpProblem p = make_lmp(gen_lmp_random(3, 15, 12, 2));
  const PrimalImage img = benson_primal(p.vlp, initial_outer_approx(p.vlp));
  for (Algorithm alg : {Algorithm::primal, Algorithm::dual, Algorithm::dual_se}) {
    const QcpResult r = solve_qcp(p, alg);
    EXPECT_TRUE(contains_point(img.vertices, r.y, 1e-6 * scale_of(r.y))) << to_string(alg);
  }
}

TEST(QcpInvariants, FailedCutsOnlyInTheDualAlgorithms) {
  double fc_min = 0, fc_first = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const QcpProblem p = make_lmp(gen_lmp_random(3, 15, 12, seed));
    EXPECT_EQ(solve_qcp(p, Algorithm::primal).failed_cuts, 0);
    const QcpResult a = solve_qcp(p, Algorithm::dual);
    const QcpResult b = solve_qcp(p, Algorithm::dual_se);
    int counted = 0;
    for (const auto& rec : a.history) counted += rec.failed_cut ? 1 : 0;
    EXPECT_EQ(counted, a.failed_cuts);
    EXPECT_FALSE(a.history.front().failed_cut);
    fc_min += a.failed_cuts;
    fc_first += b.failed_cuts;
  }
  RecordProperty("failed_cuts_min_phi", std::to_string(fc_min / 6));
  RecordProperty("failed_cuts_first_violating", std::to_string(fc_first / 6));
  EXPECT_LE(fc_min, fc_first);
}

TEST(QcpInvariants, LpSolveCountsAreLogged) {
  // The primal algorithm usually needs fewer LPs than the full image computation; only logged.
  const QcpProblem p = make_lmp(gen_lmp_random(2, 20, 30, 3));
  const QcpResult r = solve_qcp(p, Algorithm::primal);
  const PrimalImage img = benson_primal(p.vlp, initial_outer_approx(p.vlp));
  RecordProperty("alg2_lp_solves", r.lp_solves);
  RecordProperty("alg1_lp_solves", img.lp_solves);
  EXPECT_GT(r.lp_solves, 0);
}

TEST(QcpErrors, IterationLimit) {
  QcpOptions opts;
  opts.max_iterations = 1;
  const QcpProblem p = make_lmp(gen_lmp_random(3, 15, 12, 1));
  EXPECT_THROW(solve_qcp(p, Algorithm::primal, opts), Error);
}

TEST(QcpErrors, UnboundedImageIsReported) {
  QcpProblem p = tiny_constant(0.0);
  p.vlp.P = -p.vlp.P;
  try {
    solve_qcp(p, Algorithm::dual);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::assumption_violated);
  }
}

TEST(Monotonicity, SpotCheck) {
  EXPECT_EQ(spot_check_monotone(make_lmp(gen_lmp_random(3, 10, 8, 1))), 0);
  EXPECT_EQ(spot_check_monotone(make_example_41()), 0);
  EXPECT_EQ(spot_check_monotone(make_nonsolid_example()), 0);
  // -y1 is not monotone with respect to R^2_+
  QcpProblem bad = tiny_constant(0.0);
  bad.f.eval = [](const Vector& y) { return -y[0]; };
  EXPECT_GT(spot_check_monotone(bad), 0);
}

TEST(Determinism, IdenticalRuns) {
  const QcpProblem p = make_lmp(gen_lmp_random(3, 15, 12, 5));
  for (Algorithm alg : {Algorithm::primal, Algorithm::dual, Algorithm::dual_se}) {
    const QcpResult a = solve_qcp(p, alg), b = solve_qcp(p, alg);
    EXPECT_EQ(a.x, b.x);
    EXPECT_EQ(a.iterations, b.iterations);
    EXPECT_EQ(a.lp_solves, b.lp_solves);
    EXPECT_EQ(a.failed_cuts, b.failed_cuts);
  }
}
