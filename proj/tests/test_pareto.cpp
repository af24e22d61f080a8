#include "minimax/pareto.hpp"

#include "fixtures.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace minimax {
namespace {

struct Sweep {
  LiftStudy study;
  OutcomeMatrix A;
  ConfidenceRegion region;
  DecisionSpace space;
};

Sweep reference() {
  const LiftStudy study = fixtures::reference_study();
  return {study, build_outcome_matrix(study), BinomialLR(study, 0.05),
          DecisionSpace(study.num_channels(), study.budget)};
}

TEST(Pareto, DefaultGridSpansFrontier) {
  const Sweep s = reference();
  const auto grid = default_phi_grid(s.A, s.region, s.space, 11);
  ASSERT_EQ(grid.size(), 11U);
  EXPECT_EQ(grid.front(), best_response_value(s.space, mle(s.study), s.A).value);
  EXPECT_NEAR(grid.back(), admm_solve(s.A, s.region, s.space).result.expected_value, 1e-12);
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_LE(grid[i], grid[i - 1]);
  EXPECT_THROW(default_phi_grid(s.A, s.region, s.space, 1), std::invalid_argument);
}

TEST(Pareto, TopOfFrontierIsNaiveDecision) {
  const Sweep s = reference();
  const auto best = best_response_value(s.space, mle(s.study), s.A);
  const auto points = sweep(s.A, s.region, s.space, {best.value});
  ASSERT_TRUE(points[0].ok()) << points[0].error;
  EXPECT_FALSE(points[0].warm_started);
  EXPECT_NEAR(points[0].expected_value, best.value, 1e-8);
  EXPECT_LE((points[0].decision - naive_optimal(s.space, mle(s.study), s.A)).norm(), 1e-6);
}

TEST(Pareto, InactiveFloorGivesUnconstrainedSolution) {
  const Sweep s = reference();
  const auto free = admm_solve(s.A, s.region, s.space).result;
  const auto points = sweep(s.A, s.region, s.space, {-1e6}, {}, false);
  ASSERT_TRUE(points[0].ok());
  EXPECT_NEAR(points[0].robust_value, free.robust_value, 1e-6);
  EXPECT_LE((points[0].decision - free.decision).norm(), 1e-4);
}

TEST(Pareto, RobustValueFallsAsFloorRises) {
  const Sweep s = reference();
  const auto grid = default_phi_grid(s.A, s.region, s.space, 5);
  const auto warm = sweep(s.A, s.region, s.space, grid);
  const auto cold = sweep(s.A, s.region, s.space, grid, {}, false);
  ASSERT_EQ(warm.size(), grid.size());
  for (std::size_t i = 0; i < warm.size(); ++i) {
    ASSERT_TRUE(warm[i].ok()) << warm[i].error;
    EXPECT_EQ(warm[i].warm_started, i > 0);
    EXPECT_FALSE(cold[i].warm_started);
    EXPECT_GE(warm[i].expected_value, grid[i] - 1e-8);
    EXPECT_LE(warm[i].robust_value, warm[i].expected_value + 1e-8);
    EXPECT_NEAR(warm[i].robust_value, cold[i].robust_value, 1e-4);
    if (i > 0) {
      // grid descends, so phi rises towards the front of the list
      EXPECT_GE(warm[i].robust_value, warm[i - 1].robust_value - 1e-6);
      EXPECT_GE(cold[i].robust_value, cold[i - 1].robust_value - 1e-6);
    }
  }
}

TEST(Pareto, InfeasiblePointIsRecordedAndSweepContinues) {
  const Sweep s = reference();
  const double h = best_response_value(s.space, mle(s.study), s.A).value;
  const auto points = sweep(s.A, s.region, s.space, {h + 1.0, 0.5 * h});
  ASSERT_EQ(points.size(), 2U);
  EXPECT_FALSE(points[0].ok());
  EXPECT_NE(points[0].error.find("phi exceeds"), std::string::npos);
  EXPECT_TRUE(points[1].ok());
  EXPECT_FALSE(points[1].warm_started);
}

TEST(Pareto, RejectsAscendingGrid) {
  const Sweep s = reference();
  EXPECT_THROW(sweep(s.A, s.region, s.space, {0.0, 0.01}), std::invalid_argument);
}

}  // namespace
}  // namespace minimax
