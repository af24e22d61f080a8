// Warm-started sweep over the expected-outcome floor phi:
//
//   maximize_c min_{beta in S} c^T A beta
//   subject to c in C, c^T A beta_hat >= phi
//
// Starting at phi = h(beta_hat) (whose only solutions are naive-optimal)
// and lowering phi only enlarges the feasible set, so each solution is a
// feasible start for the next.

#ifndef MINIMAX_PARETO_HPP_
#define MINIMAX_PARETO_HPP_

#include "minimax/decision.hpp"
#include "minimax/regions.hpp"
#include "minimax/solvers.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace minimax {

struct ParetoPoint {
  double phi = 0.0;
  Vector decision;
  double robust_value = 0.0;
  double expected_value = 0.0;
  int iterations = 0;
  bool warm_started = false;
  SolveStatus status = SolveStatus::kConverged;
  std::string error;  // set when this point could not be solved

  bool ok() const { return error.empty(); }
};

/// `count` evenly spaced floors from h(beta_hat) down to the expected value of
/// the unconstrained robust solution.
inline std::vector<double> default_phi_grid(const OutcomeMatrix& A, const ConfidenceRegion& region,
                                            const DecisionSpace& space, int count,
                                            const AdmmConfig& config = {}) {
  if (count < 2) throw std::invalid_argument("phi grid needs at least two points");
  const DecisionSpace base = space.without_floor();
  const double top = best_response_value(base, region_center(region), A).value;
  const double bottom = admm_solve(A, region, base, config).result.expected_value;
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(count - 1);
    grid.push_back(top + frac * (bottom - top));
  }
  grid.front() = top;
  return grid;
}

/// Solves one floor-constrained problem per grid value, in order. With
/// warm_start, each solve begins from the previous (c*, beta*); the first
/// begins from the naive optimum. Per-point failures are recorded and the
/// sweep continues.
inline std::vector<ParetoPoint> sweep(const OutcomeMatrix& A, const ConfidenceRegion& region,
                                      const DecisionSpace& base_space,
                                      const std::vector<double>& phi_grid,
                                      const AdmmConfig& config = {}, bool warm_start = true) {
  for (std::size_t i = 1; i < phi_grid.size(); ++i) {
    if (phi_grid[i] > phi_grid[i - 1]) {
      throw std::invalid_argument("pareto sweep: phi grid must be descending");
    }
  }
  const DecisionSpace base = base_space.without_floor();
  const Vector& beta_hat = region_center(region);
  const Vector naive = naive_optimal(base, beta_hat, A);

  std::vector<ParetoPoint> points;
  std::optional<InitialPoint> previous;
  for (std::size_t i = 0; i < phi_grid.size(); ++i) {
    ParetoPoint point;
    point.phi = phi_grid[i];
    try {
      const DecisionSpace space = base.with_floor(beta_hat, A, point.phi);
      std::optional<InitialPoint> init;
      if (warm_start) {
        init = previous ? previous : std::optional<InitialPoint>(InitialPoint{naive, std::nullopt});
        point.warm_started = previous.has_value();
      }
      const auto out = admm_solve(A, region, space, config, init);
      point.decision = out.result.decision;
      point.robust_value = out.result.robust_value;
      point.expected_value = out.result.expected_value;
      point.iterations = out.result.iterations;
      point.status = out.result.status;
      previous = InitialPoint{out.result.decision, out.result.worst_case};
    } catch (const std::exception& e) {
      point.error = e.what();
    }
    points.push_back(std::move(point));
  }
  return points;
}

}  // namespace minimax

#endif  // MINIMAX_PARETO_HPP_
