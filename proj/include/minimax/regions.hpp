// Confidence regions S over the parameter vector beta, with the three
// primitives every solver needs: membership, linear minimization over S
// (the worst-case parameters for a decision), and generalized projection
// argmin_{beta in S} ||M beta - w||^2 through a linear map M.

#ifndef MINIMAX_REGIONS_HPP_
#define MINIMAX_REGIONS_HPP_

#include "minimax/barrier.hpp"
#include "minimax/model.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <type_traits>
#include <variant>

namespace minimax {

/// {beta : (beta - center)^T P (beta - center) <= 1}, P symmetric positive
/// definite. May extend outside [0, 1]^{2n}.
class Ellipsoid {
 public:
  Ellipsoid(Vector center, Matrix shape)
      : center_(std::move(center)), shape_(std::move(shape)) {
    if (shape_.rows() != shape_.cols() || shape_.rows() != center_.size()) {
      throw std::invalid_argument("ellipsoid: shape must be square and match center");
    }
    if (!shape_.isApprox(shape_.transpose(), 1e-12)) {
      throw std::invalid_argument("ellipsoid: shape must be symmetric");
    }
    chol_.compute(shape_);
    if (chol_.info() != Eigen::Success) {
      throw std::invalid_argument("ellipsoid: shape must be positive definite");
    }
  }

  const Vector& center() const { return center_; }
  const Matrix& shape() const { return shape_; }
  Eigen::Index dimension() const { return center_.size(); }

  /// (beta - center)^T P (beta - center).
  double quadratic_form(const Vector& beta) const {
    const Vector d = beta - center_;
    return d.dot(shape_ * d);
  }

  /// P^{-1} x.
  Vector solve(const Vector& x) const { return chol_.solve(x); }

 private:
  Vector center_;
  Matrix shape_;
  Eigen::LLT<Matrix> chol_;
};

/// Likelihood-ratio acceptance region of the binomial model:
/// {beta in [0,1]^{2n} : 2 (l(mle) - l(beta)) <= chi2_{1-alpha, 2n}}.
class BinomialLR {
 public:
  BinomialLR(LiftStudy study, double alpha) : study_(std::move(study)), alpha_(alpha) {
    validate(study_);
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw std::invalid_argument("binomial-lr: alpha must lie in (0, 1)");
    }
    mle_ = mle(study_);
    radius_ = chi2_quantile(1.0 - alpha, static_cast<int>(study_.num_params()));
    max_log_likelihood_ = log_likelihood(mle_, study_);
  }

  const LiftStudy& study() const { return study_; }
  const Vector& mle_point() const { return mle_; }
  double alpha() const { return alpha_; }
  double radius() const { return radius_; }
  double max_log_likelihood() const { return max_log_likelihood_; }
  Eigen::Index dimension() const { return mle_.size(); }

  /// 2 (l(mle) - l(beta)), accumulated term by term as log-ratios so it
  /// stays accurate near the MLE. +infinity outside the likelihood support.
  double statistic(const Vector& beta) const {
    double total = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
      const double b = beta[j];
      if (!(b >= 0.0 && b <= 1.0)) return std::numeric_limits<double>::infinity();
      const auto s = static_cast<double>(study_.successes(static_cast<std::size_t>(j)));
      const auto t = static_cast<double>(study_.trials(static_cast<std::size_t>(j)));
      const double m = mle_[j];
      if (s > 0.0) {
        if (b <= 0.0) return std::numeric_limits<double>::infinity();
        total += s * std::log1p((b - m) / m);
      }
      if (t - s > 0.0) {
        if (b >= 1.0) return std::numeric_limits<double>::infinity();
        total += (t - s) * std::log1p((m - b) / (1.0 - m));
      }
    }
    return std::max(0.0, -2.0 * total);
  }

  /// Gradient and diagonal Hessian of statistic() at a box-interior point.
  void statistic_derivatives(const Vector& beta, Vector& grad, Vector& hess_diag) const {
    grad.resize(beta.size());
    hess_diag.resize(beta.size());
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
      const double b = beta[j];
      const auto s = static_cast<double>(study_.successes(static_cast<std::size_t>(j)));
      const auto f = static_cast<double>(study_.trials(static_cast<std::size_t>(j))) - s;
      grad[j] = -2.0 * (s / b - f / (1.0 - b));
      hess_diag[j] = 2.0 * (s / (b * b) + f / ((1.0 - b) * (1.0 - b)));
    }
  }

 private:
  LiftStudy study_;
  double alpha_;
  Vector mle_;
  double radius_ = 0.0;
  double max_log_likelihood_ = 0.0;
};

using ConfidenceRegion = std::variant<Ellipsoid, BinomialLR>;

inline Eigen::Index dimension(const ConfidenceRegion& region) {
  return std::visit([](const auto& r) { return r.dimension(); }, region);
}

/// The point estimate the region is built around.
inline const Vector& region_center(const ConfidenceRegion& region) {
  if (const auto* e = std::get_if<Ellipsoid>(&region)) return e->center();
  return std::get<BinomialLR>(region).mle_point();
}

inline bool contains(const ConfidenceRegion& region, const Vector& beta, double slack = 0.0) {
  if (beta.size() != dimension(region)) return false;
  if (!beta.allFinite()) return false;
  if (const auto* e = std::get_if<Ellipsoid>(&region)) {
    return e->quadratic_form(beta) <= 1.0 + slack;
  }
  const auto& lr = std::get<BinomialLR>(region);
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (beta[j] < -slack || beta[j] > 1.0 + slack) return false;
  }
  // Clip into the box before evaluating the likelihood; the box itself was
  // checked with slack above.
  const Vector clipped = beta.cwiseMax(0.0).cwiseMin(1.0);
  return lr.statistic(clipped) <= lr.radius() + slack;
}

namespace detail {

// Log-barrier for the ellipsoid: -log(1 - (beta - c)^T P (beta - c)).
class EllipsoidBarrier {
 public:
  explicit EllipsoidBarrier(const Ellipsoid& e) : e_(e) {}

  bool strictly_feasible(const Vector& beta) const {
    return beta.allFinite() && e_.quadratic_form(beta) < 1.0;
  }

  // Phi(beta + step) - Phi(beta), assuming both strictly feasible.
  double delta(const Vector& beta, const Vector& step) const {
    const double s0 = 1.0 - e_.quadratic_form(beta);
    const double s1 = 1.0 - e_.quadratic_form(beta + step);
    return -std::log(s1 / s0);
  }

  void derivatives(const Vector& beta, Vector& grad, Matrix& hess) const {
    const Vector pd = e_.shape() * (beta - e_.center());
    const double slack = 1.0 - e_.quadratic_form(beta);
    grad = 2.0 * pd / slack;
    hess = 2.0 * e_.shape() / slack + 4.0 * pd * pd.transpose() / (slack * slack);
  }

  int num_constraints() const { return 1; }

 private:
  const Ellipsoid& e_;
};

// Log-barrier for the LR region: -log(r - stat(beta)) plus box logs.
class BinomialLRBarrier {
 public:
  explicit BinomialLRBarrier(const BinomialLR& lr) : lr_(lr) {}

  bool strictly_feasible(const Vector& beta) const {
    if (!beta.allFinite()) return false;
    if ((beta.array() <= 0.0).any() || (beta.array() >= 1.0).any()) return false;
    return lr_.statistic(beta) < lr_.radius();
  }

  double delta(const Vector& beta, const Vector& step) const {
    const Vector next = beta + step;
    double d = -std::log((lr_.radius() - lr_.statistic(next)) /
                         (lr_.radius() - lr_.statistic(beta)));
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
      d -= std::log(next[j] / beta[j]);
      d -= std::log((1.0 - next[j]) / (1.0 - beta[j]));
    }
    return d;
  }

  void derivatives(const Vector& beta, Vector& grad, Matrix& hess) const {
    Vector sg;
    Vector sh;
    lr_.statistic_derivatives(beta, sg, sh);
    const double slack = lr_.radius() - lr_.statistic(beta);
    const Eigen::ArrayXd lo = beta.array();
    const Eigen::ArrayXd hi = 1.0 - beta.array();
    grad = sg / slack;
    grad.array() += -1.0 / lo + 1.0 / hi;
    hess = sg * sg.transpose() / (slack * slack);
    hess.diagonal().array() += sh.array() / slack + 1.0 / (lo * lo) + 1.0 / (hi * hi);
  }

  int num_constraints() const { return 1 + 2 * static_cast<int>(lr_.dimension()); }

 private:
  const BinomialLR& lr_;
};

}  // namespace detail

/// A strictly feasible point for the barrier solver: the center, with
/// coordinates on {0, 1} (degenerate MLEs) pulled 1e-4 toward 0.5.
inline Vector interior_start(const ConfidenceRegion& region) {
  if (const auto* e = std::get_if<Ellipsoid>(&region)) return e->center();
  const auto& lr = std::get<BinomialLR>(region);
  Vector start = lr.mle_point();
  constexpr double kShrink = 1e-4;
  for (Eigen::Index j = 0; j < start.size(); ++j) {
    if (start[j] <= 0.0) start[j] = kShrink;
    if (start[j] >= 1.0) start[j] = 1.0 - kShrink;
  }
  if (!detail::BinomialLRBarrier(lr).strictly_feasible(start)) {
    throw std::runtime_error("binomial-lr: could not find a strictly feasible start");
  }
  return start;
}

namespace detail {

template <typename Objective>
BarrierResult barrier_over_region(const ConfidenceRegion& region, const Objective& objective,
                                  const BarrierConfig& config) {
  const Vector start = interior_start(region);
  return std::visit(
      [&](const auto& r) {
        using R = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<R, Ellipsoid>) {
          return barrier_minimize(objective, EllipsoidBarrier(r), start, config);
        } else {
          return barrier_minimize(objective, BinomialLRBarrier(r), start, config);
        }
      },
      region);
}

}  // namespace detail

struct WorstCase {
  Vector beta;
  double value = 0.0;  // c^T A beta
  bool converged = true;
};

/// argmin_{beta in S} q^T beta. Closed form beta_hat - P^{-1} q / sqrt(q^T P^{-1} q)
/// on ellipsoids, log-barrier Newton on likelihood-ratio regions. q = 0
/// returns the center.
inline WorstCase linear_minimize(const ConfidenceRegion& region, const Vector& q,
                                 const BarrierConfig& config = {}) {
  if (q.size() != dimension(region)) {
    throw std::invalid_argument("linear_minimize: dimension mismatch");
  }
  if (q.squaredNorm() == 0.0) {
    return {region_center(region), 0.0, true};
  }
  if (const auto* e = std::get_if<Ellipsoid>(&region)) {
    const Vector pinv_q = e->solve(q);
    const Vector beta = e->center() - pinv_q / std::sqrt(q.dot(pinv_q));
    return {beta, q.dot(beta), true};
  }
  const auto result = detail::barrier_over_region(region, LinearObjective{q}, config);
  return {result.x, q.dot(result.x), result.converged};
}

/// Worst-case parameters for decision c: argmin_{beta in S} c^T A beta, with
/// value f(c).
inline WorstCase worst_case_params(const ConfidenceRegion& region, const Vector& c,
                                   const OutcomeMatrix& A, const BarrierConfig& config = {}) {
  if (c.size() != A.rows() || A.cols() != dimension(region)) {
    throw std::invalid_argument("worst_case_params: dimension mismatch");
  }
  if (!c.allFinite()) throw std::invalid_argument("worst_case_params: decision must be finite");
  return linear_minimize(region, A.dense().transpose() * c, config);
}

struct GeneralizedProjection {
  Vector beta;
  double objective = 0.0;  // ||M beta - w||^2
  bool converged = true;
};

/// argmin_{beta in S} ||M beta - w||^2 for an arbitrary linear map M.
inline GeneralizedProjection generalized_projection(const ConfidenceRegion& region,
                                                    const Matrix& map, const Vector& w,
                                                    const BarrierConfig& config = {}) {
  if (map.cols() != dimension(region) || map.rows() != w.size()) {
    throw std::invalid_argument("generalized_projection: dimension mismatch");
  }
  if (!w.allFinite()) {
    throw std::invalid_argument("generalized_projection: target must be finite");
  }
  const auto result =
      detail::barrier_over_region(region, QuadraticObjective{map, w}, config);
  return {result.x, (map * result.x - w).squaredNorm(), result.converged};
}

inline GeneralizedProjection generalized_projection(const ConfidenceRegion& region,
                                                    const OutcomeMatrix& A, const Vector& w,
                                                    const BarrierConfig& config = {}) {
  return generalized_projection(region, A.dense(), w, config);
}

}  // namespace minimax

#endif  // MINIMAX_REGIONS_HPP_
