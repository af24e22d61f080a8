// Lift-study data model: channel data, the outcome matrix, the bilinear
// outcome g(c; beta) = c^T A beta, the binomial log-likelihood and its MLE,
// and the chi-square quantile that sizes likelihood-ratio regions.
//
// Parameter layout is interleaved per channel:
//   beta = [beta_1^H, beta_1^M, beta_2^H, beta_2^M, ...]
// so row i of A touches only columns 2i (holdout) and 2i+1 (marketing).

#ifndef MINIMAX_MODEL_HPP_
#define MINIMAX_MODEL_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace minimax {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct ChannelData {
  long trials_holdout = 0;
  long successes_holdout = 0;
  long trials_marketing = 0;
  long successes_marketing = 0;
  double cost = 1.0;  // resource units per person reached

  bool operator==(const ChannelData&) const = default;
};

struct LiftStudy {
  std::vector<ChannelData> channels;
  double budget = 1.0;

  std::size_t num_channels() const { return channels.size(); }
  std::size_t num_params() const { return 2 * channels.size(); }

  // Successes and trials of parameter group j in the interleaved layout.
  long successes(std::size_t j) const {
    const auto& ch = channels.at(j / 2);
    return j % 2 == 0 ? ch.successes_holdout : ch.successes_marketing;
  }
  long trials(std::size_t j) const {
    const auto& ch = channels.at(j / 2);
    return j % 2 == 0 ? ch.trials_holdout : ch.trials_marketing;
  }

  bool operator==(const LiftStudy&) const = default;
};

inline void validate(const LiftStudy& study) {
  if (study.channels.empty()) {
    throw std::invalid_argument("lift study needs at least one channel");
  }
  if (!(study.budget > 0.0) || !std::isfinite(study.budget)) {
    throw std::invalid_argument("budget must be positive and finite");
  }
  for (std::size_t i = 0; i < study.channels.size(); ++i) {
    const auto& ch = study.channels[i];
    const std::string where = "channel " + std::to_string(i) + ": ";
    if (ch.trials_holdout <= 0 || ch.trials_marketing <= 0) {
      throw std::invalid_argument(where + "trials must be positive");
    }
    if (ch.successes_holdout < 0 || ch.successes_holdout > ch.trials_holdout ||
        ch.successes_marketing < 0 ||
        ch.successes_marketing > ch.trials_marketing) {
      throw std::invalid_argument(where + "successes must lie in [0, trials]");
    }
    if (!(ch.cost > 0.0) || !std::isfinite(ch.cost)) {
      throw std::invalid_argument(where + "cost must be positive");
    }
  }
}

/// The n x 2n matrix A mapping conversion rates to per-unit incremental
/// outcomes: row i holds -1/cost_i and +1/cost_i in columns 2i and 2i+1.
class OutcomeMatrix {
 public:
  explicit OutcomeMatrix(const std::vector<double>& costs) {
    if (costs.empty()) {
      throw std::invalid_argument("outcome matrix needs at least one channel");
    }
    const auto n = static_cast<Eigen::Index>(costs.size());
    dense_ = Matrix::Zero(n, 2 * n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double cost = costs[static_cast<std::size_t>(i)];
      if (!(cost > 0.0) || !std::isfinite(cost)) {
        throw std::invalid_argument("channel cost must be positive");
      }
      dense_(i, 2 * i) = -1.0 / cost;
      dense_(i, 2 * i + 1) = 1.0 / cost;
    }
  }

  Eigen::Index rows() const { return dense_.rows(); }
  Eigen::Index cols() const { return dense_.cols(); }
  const Matrix& dense() const { return dense_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return dense_(i, j); }

 private:
  Matrix dense_;
};

inline OutcomeMatrix build_outcome_matrix(const LiftStudy& study) {
  std::vector<double> costs;
  costs.reserve(study.channels.size());
  for (const auto& ch : study.channels) costs.push_back(ch.cost);
  return OutcomeMatrix(costs);
}

/// g(c; beta) = c^T A beta.
inline double expected_outcome(const Vector& c, const Vector& beta,
                               const OutcomeMatrix& A) {
  if (c.size() != A.rows() || beta.size() != A.cols()) {
    throw std::invalid_argument("expected_outcome: dimension mismatch");
  }
  return c.dot(A.dense() * beta);
}

namespace detail {

// s*log(p) with the 0*log(0) = 0 convention.
inline double xlogy(double s, double p) {
  if (s == 0.0) return 0.0;
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  return s * std::log(p);
}

}  // namespace detail

/// Binomial log-likelihood summed over all 2n groups. Returns -infinity when
/// some coordinate sits on {0, 1} against a nonzero opposing count.
inline double log_likelihood(const Vector& beta, const LiftStudy& study) {
  if (static_cast<std::size_t>(beta.size()) != study.num_params()) {
    throw std::invalid_argument("log_likelihood: dimension mismatch");
  }
  double total = 0.0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    const double b = beta[j];
    if (!(b >= 0.0 && b <= 1.0)) {
      throw std::invalid_argument("log_likelihood: parameter outside [0, 1]");
    }
    const auto s = static_cast<double>(study.successes(static_cast<std::size_t>(j)));
    const auto t = static_cast<double>(study.trials(static_cast<std::size_t>(j)));
    total += detail::xlogy(s, b) + detail::xlogy(t - s, 1.0 - b);
  }
  return total;
}

inline Vector mle(const LiftStudy& study) {
  Vector beta(static_cast<Eigen::Index>(study.num_params()));
  for (std::size_t j = 0; j < study.num_params(); ++j) {
    beta[static_cast<Eigen::Index>(j)] =
        static_cast<double>(study.successes(j)) / static_cast<double>(study.trials(j));
  }
  return beta;
}

/// Regularized lower incomplete gamma P(a, x): power series below a + 1,
/// Lentz continued fraction for Q(a, x) above.
inline double regularized_gamma_p(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("regularized_gamma_p: a must be > 0");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double log_prefactor = a * std::log(x) - x - std::lgamma(a);
  constexpr int kMaxTerms = 10000;
  constexpr double kEps = 1e-16;
  if (x < a + 1.0) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int k = 0; k < kMaxTerms; ++k) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return std::min(1.0, sum * std::exp(log_prefactor));
  }
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::max(0.0, 1.0 - std::exp(log_prefactor) * h);
}

inline double chi2_cdf(double x, int dof) {
  if (dof < 1) throw std::invalid_argument("chi2_cdf: dof must be >= 1");
  return regularized_gamma_p(0.5 * dof, 0.5 * x);
}

/// Inverse chi-square CDF by bisection on chi2_cdf.
inline double chi2_quantile(double prob, int dof) {
  if (!(prob > 0.0 && prob < 1.0)) {
    throw std::invalid_argument("chi2_quantile: prob must lie in (0, 1)");
  }
  if (dof < 1) throw std::invalid_argument("chi2_quantile: dof must be >= 1");
  double lo = 0.0;
  double hi = std::max(1.0, static_cast<double>(dof));
  while (chi2_cdf(hi, dof) < prob) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (chi2_cdf(mid, dof) < prob) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace minimax

#endif  // MINIMAX_MODEL_HPP_
