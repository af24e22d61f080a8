// Log-barrier interior-point method for minimizing a smooth convex objective
// over a convex set described by a self-concordant-style barrier.
//
// Each stage minimizes t * F(x) + Phi(x) by damped Newton, then t <- mu * t.
// Line searches work on exact differences F(x + d) - F(x) and
// Phi(x + d) - Phi(x) so the Armijo test keeps its meaning at large t.

#ifndef MINIMAX_BARRIER_HPP_
#define MINIMAX_BARRIER_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace minimax {

struct BarrierConfig {
  double initial_weight = 1.0;   // t0
  double weight_multiplier = 20.0;  // mu
  double newton_tolerance = 1e-10;  // on lambda^2 / 2
  int max_newton_steps = 100;   // per stage
  int stages = 12;

  void validate() const {
    if (!(initial_weight > 0.0) || !(weight_multiplier > 1.0) || !(newton_tolerance > 0.0) ||
        max_newton_steps < 1 || stages < 1) {
      throw std::invalid_argument("barrier config: need t0 > 0, mu > 1, tol > 0, steps/stages >= 1");
    }
  }
};

struct BarrierResult {
  Eigen::VectorXd x;
  bool converged = true;
  int newton_steps = 0;
  double final_weight = 0.0;
};

/// F(x) = q^T x.
struct LinearObjective {
  Eigen::VectorXd q;

  double delta(const Eigen::VectorXd& /*x*/, const Eigen::VectorXd& step) const {
    return q.dot(step);
  }
  void derivatives(const Eigen::VectorXd& /*x*/, Eigen::VectorXd& grad,
                   Eigen::MatrixXd& hess) const {
    grad = q;
    hess.setZero(q.size(), q.size());
  }
};

/// F(x) = ||M x - w||^2.
struct QuadraticObjective {
  const Eigen::MatrixXd& map;
  Eigen::VectorXd target;

  double delta(const Eigen::VectorXd& x, const Eigen::VectorXd& step) const {
    const Eigen::VectorXd ms = map * step;
    return 2.0 * (map * x - target).dot(ms) + ms.squaredNorm();
  }
  void derivatives(const Eigen::VectorXd& x, Eigen::VectorXd& grad,
                   Eigen::MatrixXd& hess) const {
    grad = 2.0 * map.transpose() * (map * x - target);
    hess = 2.0 * map.transpose() * map;
  }
};

/// Objective needs delta(x, d) and derivatives(x, g, H); Barrier additionally
/// needs strictly_feasible(x). `start` must be strictly feasible.
template <typename Objective, typename Barrier>
BarrierResult barrier_minimize(const Objective& objective, const Barrier& barrier,
                               Eigen::VectorXd start, const BarrierConfig& config) {
  config.validate();
  if (!barrier.strictly_feasible(start)) {
    throw std::invalid_argument("barrier_minimize: start is not strictly feasible");
  }
  constexpr double kArmijo = 0.25;
  constexpr double kShrink = 0.5;
  constexpr double kMinStep = 1e-16;

  BarrierResult result;
  Eigen::VectorXd x = std::move(start);
  Eigen::VectorXd fg, bg, grad, step;
  Eigen::MatrixXd fh, bh, hess;
  double t = config.initial_weight;

  for (int stage = 0; stage < config.stages; ++stage) {
    bool centered = false;
    for (int it = 0; it < config.max_newton_steps; ++it) {
      objective.derivatives(x, fg, fh);
      barrier.derivatives(x, bg, bh);
      grad = t * fg + bg;
      hess = t * fh + bh;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      if (ldlt.info() != Eigen::Success) {
        result.converged = false;
        break;
      }
      step = -ldlt.solve(grad);
      const double slope = grad.dot(step);
      if (!std::isfinite(slope)) {
        result.converged = false;
        break;
      }
      if (-0.5 * slope <= config.newton_tolerance) {
        centered = true;
        break;
      }
      ++result.newton_steps;
      double s = 1.0;
      while (s > kMinStep && !barrier.strictly_feasible(x + s * step)) s *= kShrink;
      while (s > kMinStep) {
        const Eigen::VectorXd trial = s * step;
        const double change = t * objective.delta(x, trial) + barrier.delta(x, trial);
        if (change <= kArmijo * s * slope) break;
        s *= kShrink;
      }
      if (s <= kMinStep) {
        // No representable decrease left at this weight.
        centered = true;
        break;
      }
      x += s * step;
    }
    if (!result.converged) break;
    if (!centered) {
      result.converged = false;
    }
    t *= config.weight_multiplier;
  }
  result.x = std::move(x);
  result.final_weight = t / config.weight_multiplier;
  return result;
}

}  // namespace minimax

#endif  // MINIMAX_BARRIER_HPP_
