#include "minimax/decision.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

namespace minimax {
namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

TEST(Project, InteriorPointIsFixed) {
  const DecisionSpace space(2, 1.0);
  EXPECT_TRUE(project(space, vec({0.2, 0.3})).isApprox(vec({0.2, 0.3})));
}

TEST(Project, VertexAndFaceCases) {
  const DecisionSpace space(2, 1.0);
  EXPECT_LE((project(space, vec({2.0, 0.0})) - vec({1.0, 0.0})).norm(), 1e-15);
  EXPECT_LE((project(space, vec({0.8, 0.8})) - vec({0.5, 0.5})).norm(), 1e-15);
  EXPECT_LE((project(space, vec({2.0, 0.0})) - oracle::simplex_projection_enumerate(vec({2.0, 0.0}), 1.0)).norm(), 1e-15);
  EXPECT_LE((project(space, vec({0.8, 0.8})) - oracle::simplex_projection_enumerate(vec({0.8, 0.8}), 1.0)).norm(), 1e-15);
}

TEST(Project, NegativeCoordinatesClip) {
  const DecisionSpace space(3, 2.0);
  EXPECT_TRUE(project(space, vec({-1.0, 0.5, 0.25})).isApprox(vec({0.0, 0.5, 0.25})));
}

TEST(Project, MatchesActiveSetEnumeration) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(-1.5, 2.0);
  std::uniform_real_distribution<double> budget(0.3, 3.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    const double b = budget(rng);
    Vector x(n);
    for (int i = 0; i < n; ++i) x[i] = unif(rng);
    const Vector expected = oracle::simplex_projection_enumerate(x, b);
    EXPECT_LE((project(DecisionSpace(static_cast<std::size_t>(n), b), x) - expected).norm(), 1e-8);
  }
}

TEST(Project, FeasibleIdempotentNonexpansive) {
  std::mt19937_64 rng(32);
  std::normal_distribution<double> normal(0.0, 1.0);
  const DecisionSpace space(6, 1.5);
  for (int trial = 0; trial < 500; ++trial) {
    Vector x(6), y(6);
    for (int i = 0; i < 6; ++i) {
      x[i] = normal(rng);
      y[i] = normal(rng);
    }
    const Vector px = project(space, x);
    const Vector py = project(space, y);
    EXPECT_GE(px.minCoeff(), -1e-10);
    EXPECT_LE(px.sum(), 1.5 + 1e-10);
    EXPECT_LE((project(space, px) - px).norm(), 1e-12);
    EXPECT_LE((px - py).norm(), (x - y).norm() + 1e-10);
  }
}

TEST(Project, FloorMatchesActiveSetEnumeration) {
  std::mt19937_64 rng(33);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> frac(0.1, 0.9);
  const LiftStudy study = fixtures::reference_study();
  const OutcomeMatrix A = build_outcome_matrix(study);
  const Vector beta_hat = mle(study);
  const DecisionSpace base(5, 1.0);
  const double h = best_response_value(base, beta_hat, A).value;
  ASSERT_GT(h, 0.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double phi = frac(rng) * h;
    const DecisionSpace space = base.with_floor(beta_hat, A, phi);
    Vector x(5);
    for (int i = 0; i < 5; ++i) x[i] = 0.5 * normal(rng);
    const Vector c = project(space, x);
    EXPECT_TRUE(space.contains(c, 1e-10));
    EXPECT_GE((A.dense() * beta_hat).dot(c), phi - 1e-8);
    const Vector ref = oracle::floor_projection_enumerate(x, 1.0, A.dense() * beta_hat, phi);
    EXPECT_LE((c - ref).norm(), 1e-7) << trial;
    EXPECT_LE((project(space, c) - c).norm(), 1e-12);
  }
}

TEST(Project, FloorAtLargestValueLandsOnNaiveOptimum) {
  const LiftStudy study = fixtures::reference_study();
  const OutcomeMatrix A = build_outcome_matrix(study);
  const Vector beta_hat = mle(study);
  const DecisionSpace base(5, 1.0);
  const auto best = best_response_value(base, beta_hat, A);
  const DecisionSpace space = base.with_floor(beta_hat, A, best.value);
  std::mt19937_64 rng(34);
  for (const Vector& x : oracle::sample_decisions(rng, 5, 1.0, 20)) {
    const Vector c = project(space, x);
    EXPECT_GE((A.dense() * beta_hat).dot(c), best.value - 1e-12);
    EXPECT_LE((c - best.decision).norm(), 1e-9);
  }
}

TEST(DecisionSpace, RejectsInfeasibleFloorAndBadBudget) {
  const LiftStudy study = fixtures::one_channel();
  const OutcomeMatrix A = build_outcome_matrix(study);
  const DecisionSpace base(1, 1.0);
  EXPECT_THROW(base.with_floor(mle(study), A, 0.2), std::invalid_argument);
  EXPECT_NO_THROW(base.with_floor(mle(study), A, 0.099));
  EXPECT_THROW(DecisionSpace(1, 0.0), std::invalid_argument);
  EXPECT_THROW(DecisionSpace(0, 1.0), std::invalid_argument);
  EXPECT_THROW(project(base, Vector::Zero(2)), std::invalid_argument);
}

TEST(BestResponse, Examples) {
  // A = I-like rates via a two-channel matrix with unit costs.
  const OutcomeMatrix A({1.0, 1.0});
  const DecisionSpace unit(2, 1.0);
  auto r = best_response_value(unit, vec({0.0, 0.1, 0.1, 0.05}), A);
  EXPECT_NEAR(r.value, 0.1, 1e-15);
  EXPECT_TRUE(r.decision.isApprox(vec({1.0, 0.0})));

  r = best_response_value(unit, vec({0.2, 0.1, 0.3, 0.1}), A);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(r.decision, Vector::Zero(2));

  r = best_response_value(DecisionSpace(2, 2.0), vec({0.0, 0.1, 0.0, 0.1}), A);
  EXPECT_NEAR(r.value, 0.2, 1e-15);
  EXPECT_TRUE(r.decision.isApprox(vec({2.0, 0.0})));
}

TEST(BestResponse, DominatesRandomDecisions) {
  std::mt19937_64 rng(35);
  const LiftStudy study = fixtures::reference_study();
  const OutcomeMatrix A = build_outcome_matrix(study);
  const DecisionSpace space(5, 1.0);
  const Vector beta = mle(study);
  const double h = best_response_value(space, beta, A).value;
  for (const Vector& c : oracle::sample_decisions(rng, 5, 1.0, 1000)) {
    EXPECT_GE(h, expected_outcome(c, beta, A) - 1e-15);
  }
}

TEST(BestResponse, RejectsFloor) {
  const LiftStudy study = fixtures::one_channel();
  const OutcomeMatrix A = build_outcome_matrix(study);
  const DecisionSpace space = DecisionSpace(1, 1.0).with_floor(mle(study), A, 0.0);
  EXPECT_THROW(best_response_value(space, mle(study), A), std::invalid_argument);
}

TEST(NaiveOptimal, Examples) {
  const OutcomeMatrix A({1.0, 1.0});
  const DecisionSpace space(2, 1.0);
  EXPECT_TRUE(naive_optimal(space, vec({0.0, 0.10, 0.0, 0.05}), A).isApprox(vec({1.0, 0.0})));
  EXPECT_EQ(naive_optimal(space, vec({0.1, 0.0, 0.2, 0.1}), A), Vector::Zero(2));
  EXPECT_TRUE(naive_optimal(space, vec({0.0, 0.05, 0.1, 0.15}), A).isApprox(vec({1.0, 0.0})));
}

}  // namespace
}  // namespace minimax
