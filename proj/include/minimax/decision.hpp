// The decision space C = {c >= 0, sum(c) <= B}, optionally intersected with
// the expected-outcome floor {c : c^T A beta_hat >= phi}.

#ifndef MINIMAX_DECISION_HPP_
#define MINIMAX_DECISION_HPP_

#include "minimax/model.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace minimax {

/// Half-space {c : direction^T c >= phi}, with direction = A beta_hat.
struct OutcomeFloor {
  Vector direction;
  double phi = 0.0;
};

/// Euclidean projection onto the face {c >= 0, sum(c) = budget} by the
/// sort-and-threshold (water-filling) rule.
inline Vector project_simplex_face(const Vector& x, double budget) {
  std::vector<double> sorted(x.data(), x.data() + x.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double partial = 0.0;
  double threshold = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    partial += sorted[k];
    const double candidate = (partial - budget) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) threshold = candidate;
  }
  return (x.array() - threshold).cwiseMax(0.0).matrix();
}

/// Euclidean projection onto {c >= 0, sum(c) <= budget}: clip negatives, and
/// if that overspends, water-fill onto sum(c) = budget.
inline Vector project_budget_simplex(const Vector& x, double budget) {
  Vector clipped = x.cwiseMax(0.0);
  if (clipped.sum() <= budget) return clipped;
  return project_simplex_face(x, budget);
}

class DecisionSpace {
 public:
  DecisionSpace(std::size_t num_channels, double budget)
      : n_(num_channels), budget_(budget) {
    if (num_channels == 0) throw std::invalid_argument("decision space needs channels");
    if (!(budget > 0.0) || !std::isfinite(budget)) {
      throw std::invalid_argument("decision space: budget must be positive");
    }
  }

  /// Adds {c : c^T A beta_hat >= phi}. Rejects phi above the largest
  /// attainable expected outcome, where the space would be empty.
  DecisionSpace with_floor(const Vector& beta_hat, const OutcomeMatrix& A, double phi) const {
    if (static_cast<std::size_t>(A.rows()) != n_ || beta_hat.size() != A.cols()) {
      throw std::invalid_argument("decision floor: dimension mismatch");
    }
    const Vector direction = A.dense() * beta_hat;
    const double best = budget_ * std::max(0.0, direction.maxCoeff());
    if (!(phi <= best)) {
      throw std::invalid_argument("decision floor: phi exceeds the largest feasible expected outcome");
    }
    DecisionSpace out = *this;
    out.floor_ = OutcomeFloor{direction, phi};
    return out;
  }

  DecisionSpace without_floor() const { return DecisionSpace(n_, budget_); }

  std::size_t num_channels() const { return n_; }
  double budget() const { return budget_; }
  const std::optional<OutcomeFloor>& floor() const { return floor_; }

  bool contains(const Vector& c, double slack = 1e-10) const {
    if (static_cast<std::size_t>(c.size()) != n_ || !c.allFinite()) return false;
    if (c.minCoeff() < -slack || c.sum() > budget_ + slack) return false;
    if (floor_ && floor_->direction.dot(c) < floor_->phi - slack) return false;
    return true;
  }

 private:
  std::size_t n_;
  double budget_;
  std::optional<OutcomeFloor> floor_;
};

namespace detail {

// Projection onto simplex ∩ {a^T c >= phi}. The KKT system reduces to
// c(lambda) = P_simplex(x + lambda a) with lambda >= 0 and complementarity;
// a^T c(lambda) is nondecreasing and piecewise linear in lambda.
inline Vector project_with_floor(const Vector& x, double budget, const OutcomeFloor& floor) {
  const Vector& a = floor.direction;
  auto at = [&](double lambda) { return project_budget_simplex(x + lambda * a, budget); };
  Vector c = at(0.0);
  if (a.dot(c) >= floor.phi) return c;
  const double scale = a.norm();
  if (scale == 0.0) {
    throw std::invalid_argument("decision floor: infeasible (zero direction, phi > 0)");
  }
  double lo = 0.0;
  double hi = 1.0 / scale;
  int doublings = 0;
  while (a.dot(at(hi)) < floor.phi) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 2000) throw std::runtime_error("decision floor: projection diverged");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (a.dot(at(mid)) < floor.phi) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Finish on the final linear piece, keeping the feasible side.
  const double glo = a.dot(at(lo));
  const double ghi = a.dot(at(hi));
  if (ghi > glo) {
    const double lambda = lo + (floor.phi - glo) * (hi - lo) / (ghi - glo);
    Vector candidate = at(lambda);
    if (a.dot(candidate) >= floor.phi) return candidate;
  }
  return at(hi);
}

}  // namespace detail

/// Euclidean projection onto the decision space.
inline Vector project(const DecisionSpace& space, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != space.num_channels()) {
    throw std::invalid_argument("project: dimension mismatch");
  }
  if (!x.allFinite()) throw std::invalid_argument("project: input must be finite");
  if (!space.floor()) return project_budget_simplex(x, space.budget());
  return detail::project_with_floor(x, space.budget(), *space.floor());
}

struct BestResponse {
  double value = 0.0;  // h(beta)
  Vector decision;
};

/// h(beta) = sup_{c in C} c^T A beta = B * max(0, max_i (A beta)_i). Ties go
/// to the lowest channel index.
inline BestResponse best_response_value(const DecisionSpace& space, const Vector& beta,
                                        const OutcomeMatrix& A) {
  if (space.floor()) {
    throw std::invalid_argument("best_response_value: defined on the space without floor");
  }
  if (static_cast<std::size_t>(A.rows()) != space.num_channels() || beta.size() != A.cols()) {
    throw std::invalid_argument("best_response_value: dimension mismatch");
  }
  const Vector rates = A.dense() * beta;
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < rates.size(); ++i) {
    if (rates[i] > rates[best]) best = i;
  }
  BestResponse out{0.0, Vector::Zero(rates.size())};
  if (rates[best] > 0.0) {
    out.decision[best] = space.budget();
    out.value = space.budget() * rates[best];
  }
  return out;
}

/// c0 = argmax_c g(c; beta_hat).
inline Vector naive_optimal(const DecisionSpace& space, const Vector& beta_hat,
                            const OutcomeMatrix& A) {
  return best_response_value(space, beta_hat, A).decision;
}

}  // namespace minimax

#endif  // MINIMAX_DECISION_HPP_
