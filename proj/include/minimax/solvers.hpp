// Solvers for max_{c in C} min_{beta in S} c^T A beta:
//
//   admm_solve         consensus ADMM whose y-update (the prox of -f) is an
//                      exact generalized projection onto S
//   apg_solve          accelerated projected ascent on f with Danskin
//                      supergradients A beta*(c)
//   subgradient_solve  projected supergradient ascent, step a0 / sqrt(k)
//   markowitz_solve    ellipsoidal S only: maximizes the closed form
//                      f(c) = c^T A beta_hat - ||P^{-1/2} A^T c||
//
// plus the duality gap h(beta) - f(c) used as an optimality certificate.

#ifndef MINIMAX_SOLVERS_HPP_
#define MINIMAX_SOLVERS_HPP_

#include "minimax/decision.hpp"
#include "minimax/model.hpp"
#include "minimax/regions.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace minimax {

enum class SolveStatus { kConverged, kMaxIterations, kSubproblemFailure };

inline std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kConverged: return "converged";
    case SolveStatus::kMaxIterations: return "max-iterations";
    case SolveStatus::kSubproblemFailure: return "subproblem-failure";
  }
  return "unknown";
}

struct SolveResult {
  Vector decision;        // c*
  Vector worst_case;      // beta*, recovered as argmin_{beta in S} g(c*; beta)
  double robust_value = 0.0;    // f(c*)
  double expected_value = 0.0;  // g(c*; beta_hat)
  SolveStatus status = SolveStatus::kConverged;
  int iterations = 0;
  std::string message;
};

/// One traced iteration. Fields a solver does not produce stay empty.
struct TraceRecord {
  int iteration = 0;
  std::optional<double> primal_residual;
  std::optional<double> dual_residual;
  std::optional<double> eps_pri;
  std::optional<double> eps_dual;
  std::optional<double> duality_gap;
};

struct IterateTrace {
  std::string solver;
  std::vector<TraceRecord> records;
};

struct InitialPoint {
  Vector decision;
  std::optional<Vector> params;
};

struct AdmmConfig {
  double rho = 1.0;
  double eps_abs = 1e-6;
  double eps_rel = 1e-4;
  int max_iterations = 10000;
  bool trace_gap = false;
  BarrierConfig barrier;

  void validate() const {
    if (!(rho > 0.0) || !(eps_abs > 0.0) || !(eps_rel > 0.0) || max_iterations < 1) {
      throw std::invalid_argument("admm config: rho, tolerances and max_iterations must be positive");
    }
    barrier.validate();
  }
};

struct ApgConfig {
  int max_iterations = 500;
  double initial_step = 1.0;
  int max_backtracks = 60;
  double gap_tolerance = 1e-10;   // stop once the certificate is this small
  double step_tolerance = 1e-13;  // or once iterates stop moving
  bool trace_gap = true;
  BarrierConfig barrier;

  void validate() const {
    if (max_iterations < 1 || !(initial_step > 0.0) || max_backtracks < 1) {
      throw std::invalid_argument("apg config: iterations, step and backtracks must be positive");
    }
    barrier.validate();
  }
};

struct SubgradientConfig {
  int max_iterations = 200;
  std::optional<double> initial_step;  // a0; default 1 / ||A||_2
  bool trace_gap = true;
  BarrierConfig barrier;

  void validate() const {
    if (max_iterations < 1 || (initial_step && !(*initial_step > 0.0))) {
      throw std::invalid_argument("subgradient config: iterations and step must be positive");
    }
    barrier.validate();
  }
};

namespace detail {

inline void check_problem(const OutcomeMatrix& A, const ConfidenceRegion& region,
                          const DecisionSpace& space) {
  if (static_cast<std::size_t>(A.rows()) != space.num_channels() ||
      A.cols() != dimension(region)) {
    throw std::invalid_argument("solver: A, region and decision space dimensions disagree");
  }
}

inline Vector default_start(const DecisionSpace& space) {
  const auto n = static_cast<Eigen::Index>(space.num_channels());
  return project(space, Vector::Constant(n, space.budget() / static_cast<double>(n)));
}

inline Vector start_point(const DecisionSpace& space, const std::optional<InitialPoint>& init) {
  if (!init) return default_start(space);
  if (!space.contains(init->decision, 1e-8)) {
    throw std::invalid_argument("solver: initial decision is not in the decision space");
  }
  return project(space, init->decision);
}

// h(beta*(c)) - f(c) over the space without its floor.
inline double gap_at(const DecisionSpace& space, const OutcomeMatrix& A, const WorstCase& wc) {
  const double h = best_response_value(space.without_floor(), wc.beta, A).value;
  return h - wc.value;
}

inline SolveResult finish(const OutcomeMatrix& A, const ConfidenceRegion& region,
                          const Vector& c, const BarrierConfig& barrier, SolveStatus status,
                          int iterations) {
  SolveResult result;
  const WorstCase wc = worst_case_params(region, c, A, barrier);
  result.decision = c;
  result.worst_case = wc.beta;
  result.robust_value = wc.value;
  result.expected_value = expected_outcome(c, region_center(region), A);
  result.status = status;
  result.iterations = iterations;
  if (!wc.converged) result.message = "worst-case recovery did not fully converge";
  return result;
}

}  // namespace detail

struct ProxResult {
  Vector y;
  Vector beta;
  bool converged = true;
};

/// prox_{-f/rho}(v): generalized projection of -rho v onto S, then
/// y = v + A beta / rho.
inline ProxResult prox_ftilde(const OutcomeMatrix& A, const ConfidenceRegion& region, double rho,
                              const Vector& v, const BarrierConfig& barrier = {}) {
  if (!(rho > 0.0)) throw std::invalid_argument("prox_ftilde: rho must be positive");
  if (v.size() != A.rows()) throw std::invalid_argument("prox_ftilde: dimension mismatch");
  const auto proj = generalized_projection(region, A, Vector(-rho * v), barrier);
  return {v + A.dense() * proj.beta / rho, proj.beta, proj.converged};
}

/// h(beta) - f(c), with h taken over the space without its floor.
inline double duality_gap(const OutcomeMatrix& A, const ConfidenceRegion& region,
                          const DecisionSpace& space, const Vector& c, const Vector& beta,
                          const BarrierConfig& barrier = {}) {
  detail::check_problem(A, region, space);
  if (!space.contains(c, 1e-8)) throw std::invalid_argument("duality_gap: c is not feasible");
  if (!contains(region, beta, 1e-6)) throw std::invalid_argument("duality_gap: beta is not in S");
  const double h = best_response_value(space.without_floor(), beta, A).value;
  return h - worst_case_params(region, c, A, barrier).value;
}

struct AdmmOutput {
  SolveResult result;
  IterateTrace trace;
};

/// ADMM on  minimize -f(y) + I_C(c)  s.t.  y = c  (scaled form):
///   v    = c - u
///   beta = argmin_{beta in S} ||A beta + rho v||^2
///   y    = v + A beta / rho
///   c+   = proj_C(y + u)
///   u+   = u + y - c+
/// stopping on ||y - c+|| <= eps_pri and ||rho (c+ - c)|| <= eps_dual.
inline AdmmOutput admm_solve(const OutcomeMatrix& A, const ConfidenceRegion& region,
                             const DecisionSpace& space, const AdmmConfig& config = {},
                             const std::optional<InitialPoint>& init = std::nullopt) {
  config.validate();
  detail::check_problem(A, region, space);
  if (init && init->params && !contains(region, *init->params, 1e-6)) {
    throw std::invalid_argument("admm_solve: initial parameters are not in S");
  }

  AdmmOutput out;
  out.trace.solver = "admm";
  const double rho = config.rho;
  const double sqrt_n = std::sqrt(static_cast<double>(space.num_channels()));
  Vector c = detail::start_point(space, init);
  Vector u = Vector::Zero(c.size());
  Vector best_c = c;
  double best_score = std::numeric_limits<double>::infinity();
  SolveStatus status = SolveStatus::kMaxIterations;
  int k = 0;

  while (k < config.max_iterations) {
    const Vector v = c - u;
    const auto proj = generalized_projection(region, A, Vector(-rho * v), config.barrier);
    if (!proj.beta.allFinite()) {
      status = SolveStatus::kSubproblemFailure;
      break;
    }
    const Vector y = v + A.dense() * proj.beta / rho;
    const Vector c_next = project(space, y + u);
    u += y - c_next;
    ++k;

    const double r_norm = (y - c_next).norm();
    const double s_norm = rho * (c_next - c).norm();
    const double eps_pri = sqrt_n * config.eps_abs + config.eps_rel * std::max(y.norm(), c_next.norm());
    const double eps_dual = sqrt_n * config.eps_abs + config.eps_rel * rho * u.norm();
    c = c_next;

    TraceRecord rec{k, r_norm, s_norm, eps_pri, eps_dual, std::nullopt};
    if (config.trace_gap) {
      rec.duality_gap = detail::gap_at(space, A, worst_case_params(region, c, A, config.barrier));
    }
    out.trace.records.push_back(rec);

    const double score = std::max(r_norm / eps_pri, s_norm / eps_dual);
    if (score < best_score) {
      best_score = score;
      best_c = c;
    }
    if (r_norm <= eps_pri && s_norm <= eps_dual) {
      status = SolveStatus::kConverged;
      break;
    }
  }
  const Vector& final_c = status == SolveStatus::kConverged ? c : best_c;
  out.result = detail::finish(A, region, final_c, config.barrier, status, k);
  return out;
}

struct ApgOutput {
  SolveResult result;
  IterateTrace trace;
};

/// Accelerated projected ascent on f(c) = min_{beta in S} c^T A beta with
/// backtracking (step halves on a failed sufficient-increase test) and a
/// momentum restart whenever f decreases.
inline ApgOutput apg_solve(const OutcomeMatrix& A, const ConfidenceRegion& region,
                           const DecisionSpace& space, const ApgConfig& config = {},
                           const std::optional<InitialPoint>& init = std::nullopt) {
  config.validate();
  detail::check_problem(A, region, space);
  ApgOutput out;
  out.trace.solver = "apg";

  auto eval = [&](const Vector& c) { return worst_case_params(region, c, A, config.barrier); };

  Vector x = detail::start_point(space, init);
  WorstCase wx = eval(x);
  Vector z = x;
  WorstCase wz = wx;
  double theta = 1.0;
  double step = config.initial_step;
  bool restarted = false;
  SolveStatus status = SolveStatus::kMaxIterations;
  int k = 0;

  while (k < config.max_iterations) {
    const Vector grad = A.dense() * wz.beta;
    Vector x_next;
    WorstCase w_next;
    bool accepted = false;
    for (int bt = 0; bt <= config.max_backtracks; ++bt) {
      x_next = project(space, z + step * grad);
      w_next = eval(x_next);
      const Vector d = x_next - z;
      const double model = wz.value + grad.dot(d) - d.squaredNorm() / (2.0 * step);
      if (w_next.value >= model - 1e-14 * (1.0 + std::abs(wz.value))) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++k;
    if (!accepted) {
      status = SolveStatus::kSubproblemFailure;
      out.trace.records.push_back({k, {}, {}, {}, {}, std::nullopt});
      break;
    }

    if (w_next.value < wx.value) {
      TraceRecord rec{k, {}, {}, {}, {}, std::nullopt};
      if (config.trace_gap) rec.duality_gap = detail::gap_at(space, A, wx);
      out.trace.records.push_back(rec);
      if (restarted) {
        // A plain projected step from x no longer increases f: x is
        // stationary to the precision of the inner solves.
        status = SolveStatus::kConverged;
        break;
      }
      // f went down: drop momentum and restart from the last iterate.
      restarted = true;
      theta = 1.0;
      z = x;
      wz = wx;
      continue;
    }
    restarted = false;

    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    const Vector moved = x_next - x;
    z = project(space, x_next + ((theta - 1.0) / theta_next) * moved);
    wz = eval(z);
    theta = theta_next;
    x = x_next;
    wx = w_next;

    const double gap = detail::gap_at(space, A, wx);
    TraceRecord rec{k, {}, {}, {}, {}, std::nullopt};
    if (config.trace_gap) rec.duality_gap = gap;
    out.trace.records.push_back(rec);

    if ((!space.floor() && gap <= config.gap_tolerance) ||
        moved.norm() <= config.step_tolerance * (1.0 + x.norm())) {
      status = SolveStatus::kConverged;
      break;
    }
  }
  out.result = detail::finish(A, region, x, config.barrier, status, k);
  return out;
}

/// Largest singular value of M by power iteration on M^T M.
inline double spectral_norm_estimate(const Matrix& M, int iterations = 50) {
  // A ramp rather than all-ones: outcome matrices annihilate the ones vector.
  Vector x = Vector::LinSpaced(M.cols(), 1.0, static_cast<double>(M.cols()));
  x.normalize();
  double sigma = 0.0;
  for (int i = 0; i < iterations; ++i) {
    const Vector next = M.transpose() * (M * x);
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    x = next / norm;
    sigma = std::sqrt(norm);
  }
  return sigma;
}

struct SubgradientOutput {
  SolveResult result;
  IterateTrace trace;
};

/// Projected supergradient ascent c_k = P(c_{k-1} + (a0 / sqrt(k)) A beta*(c_{k-1})),
/// returning the best iterate seen.
inline SubgradientOutput subgradient_solve(const OutcomeMatrix& A, const ConfidenceRegion& region,
                                           const DecisionSpace& space,
                                           const SubgradientConfig& config = {},
                                           const std::optional<InitialPoint>& init = std::nullopt) {
  config.validate();
  detail::check_problem(A, region, space);
  SubgradientOutput out;
  out.trace.solver = "subgradient";
  const double a0 = config.initial_step.value_or(1.0 / spectral_norm_estimate(A.dense()));

  Vector c = detail::start_point(space, init);
  WorstCase wc = worst_case_params(region, c, A, config.barrier);
  Vector best_c = c;
  double best_f = wc.value;
  for (int k = 1; k <= config.max_iterations; ++k) {
    c = project(space, c + (a0 / std::sqrt(static_cast<double>(k))) * (A.dense() * wc.beta));
    wc = worst_case_params(region, c, A, config.barrier);
    if (wc.value > best_f) {
      best_f = wc.value;
      best_c = c;
    }
    TraceRecord rec{k, {}, {}, {}, {}, std::nullopt};
    if (config.trace_gap) rec.duality_gap = detail::gap_at(space, A, wc);
    out.trace.records.push_back(rec);
  }
  out.result = detail::finish(A, region, best_c, config.barrier, SolveStatus::kMaxIterations,
                              config.max_iterations);
  return out;
}

namespace detail {

// Monotone accelerated projected ascent on a smooth concave function.
template <typename Value, typename Gradient, typename Projection>
Vector maximize_smooth(const Value& value, const Gradient& gradient, const Projection& proj,
                       Vector x, int max_iterations, int& iterations) {
  double fx = value(x);
  Vector z = x;
  double theta = 1.0;
  double step = 1.0;
  for (iterations = 0; iterations < max_iterations; ++iterations) {
    const Vector g = gradient(z);
    const double fz = value(z);
    Vector x_next;
    double f_next = 0.0;
    for (int bt = 0; bt < 200; ++bt) {
      x_next = proj(z + step * g);
      f_next = value(x_next);
      const Vector d = x_next - z;
      if (f_next >= fz + g.dot(d) - d.squaredNorm() / (2.0 * step) - 1e-15 * (1.0 + std::abs(fz))) {
        break;
      }
      step *= 0.5;
    }
    if (f_next < fx) {
      theta = 1.0;
      z = x;
      continue;
    }
    const Vector moved = x_next - x;
    const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    z = proj(x_next + ((theta - 1.0) / theta_next) * moved);
    theta = theta_next;
    x = x_next;
    fx = f_next;
    if (moved.norm() <= 1e-14 * (1.0 + x.norm())) break;
    // Let the step grow back slowly so early tiny steps do not stick.
    step *= 1.05;
  }
  return x;
}

}  // namespace detail

/// Closed-form robust objective on an ellipsoid:
/// f(c) = c^T A center - sqrt(q^T P^{-1} q), q = A^T c.
inline double ellipsoid_robust_value(const Ellipsoid& e, const OutcomeMatrix& A, const Vector& c) {
  const Vector q = A.dense().transpose() * c;
  return q.dot(e.center()) - std::sqrt(std::max(0.0, q.dot(e.solve(q))));
}

/// Maximizes the closed-form f over C. Without a floor, f is positively
/// homogeneous, so the optimum is either c = 0 or on the face sum(c) = B,
/// where f is smooth.
inline SolveResult markowitz_solve(const OutcomeMatrix& A, const ConfidenceRegion& region,
                                   const DecisionSpace& space, int max_iterations = 20000) {
  const auto* e = std::get_if<Ellipsoid>(&region);
  if (!e) throw std::invalid_argument("region not ellipsoidal");
  detail::check_problem(A, region, space);

  const Vector a = A.dense() * e->center();
  auto value = [&](const Vector& c) { return ellipsoid_robust_value(*e, A, c); };
  auto gradient = [&](const Vector& c) -> Vector {
    const Vector q = A.dense().transpose() * c;
    const Vector pinv_q = e->solve(q);
    const double norm = std::sqrt(std::max(0.0, q.dot(pinv_q)));
    if (norm == 0.0) return a;
    return a - A.dense() * pinv_q / norm;
  };

  int iterations = 0;
  Vector c;
  if (!space.floor()) {
    const double budget = space.budget();
    auto face = [&](const Vector& x) { return project_simplex_face(x, budget); };
    const auto n = static_cast<Eigen::Index>(space.num_channels());
    c = detail::maximize_smooth(value, gradient, face,
                                Vector::Constant(n, budget / static_cast<double>(n)),
                                max_iterations, iterations);
    if (value(c) <= 0.0) c = Vector::Zero(n);
  } else {
    auto proj = [&](const Vector& x) { return project(space, x); };
    c = detail::maximize_smooth(value, gradient, proj, detail::default_start(space),
                                max_iterations, iterations);
  }
  const auto status =
      iterations < max_iterations ? SolveStatus::kConverged : SolveStatus::kMaxIterations;
  return detail::finish(A, region, c, BarrierConfig{}, status, iterations);
}

}  // namespace minimax

#endif  // MINIMAX_SOLVERS_HPP_
