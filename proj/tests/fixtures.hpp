#ifndef MINIMAX_TESTS_FIXTURES_HPP_
#define MINIMAX_TESTS_FIXTURES_HPP_

#include "minimax/io.hpp"
#include "minimax/model.hpp"
#include "minimax/regions.hpp"

#include <random>

namespace minimax::fixtures {

// Committed reference problem for the convergence comparison.
inline constexpr std::uint64_t kReferenceSeed = 22;

inline LiftStudy one_channel() {
  LiftStudy s;
  s.budget = 1.0;
  s.channels.push_back({200, 10, 200, 30, 1.0});
  return s;
}

inline LiftStudy two_identical_channels() {
  LiftStudy s;
  s.budget = 1.0;
  s.channels.push_back({300, 15, 300, 30, 1.0});
  s.channels.push_back({300, 15, 300, 30, 1.0});
  return s;
}

inline LiftStudy two_channels() {
  LiftStudy s;
  s.budget = 1.0;
  s.channels.push_back({400, 20, 380, 38, 1.0});
  s.channels.push_back({250, 10, 260, 26, 0.8});
  return s;
}

inline LiftStudy reference_study() { return generate_lift_study(kReferenceSeed, 5, 200, 500); }

/// Tiny ellipsoid: effectively the single point `center`.
inline Ellipsoid tiny_ellipsoid(const Vector& center, double scale = 1e12) {
  const auto n = center.size();
  return Ellipsoid(center, scale * Matrix::Identity(n, n));
}

/// Random lift study with sizeable uplifts so robust solutions are nontrivial.
inline LiftStudy random_study(std::mt19937_64& rng, int channels) {
  std::uniform_int_distribution<long> trials(300, 3000);
  std::uniform_real_distribution<double> rate(0.02, 0.08);
  std::uniform_real_distribution<double> uplift(0.0, 0.05);
  std::uniform_real_distribution<double> cost(0.5, 2.0);
  LiftStudy s;
  s.budget = 1.0;
  for (int i = 0; i < channels; ++i) {
    ChannelData ch;
    ch.trials_holdout = trials(rng);
    ch.trials_marketing = trials(rng);
    const double h = rate(rng);
    const double m = h + uplift(rng);
    ch.successes_holdout = std::max(1L, std::lround(h * ch.trials_holdout));
    ch.successes_marketing = std::max(1L, std::lround(m * ch.trials_marketing));
    ch.cost = cost(rng);
    s.channels.push_back(ch);
  }
  return s;
}

/// Fisher-shaped ellipsoid around the MLE of `study`.
inline Ellipsoid fisher_ellipsoid(const LiftStudy& study, double alpha = 0.05) {
  return Ellipsoid(mle(study), fisher_shape(study, alpha));
}

}  // namespace minimax::fixtures

#endif  // MINIMAX_TESTS_FIXTURES_HPP_
