#pragma once

#include <vector>

#include "palinscan/mgf.hpp"
#include "palinscan/random.hpp"

namespace palinscan::sim {

/// Draws scores from the tilted density f_theta(x) = f_0(x) exp(theta x - phi(theta)).
///
/// The half-length k >= L is drawn from its exact tilted law (truncated once
/// the remaining mass is below 1e-12 of the analytic total). For BWS the
/// letters a_1..a_k are then drawn outside-in, each conditional on its
/// predecessor through the backward vectors Q^m u, so the pattern has
/// probability proportional to P(pattern)^(1-theta).
class TiltedScoreSampler {
 public:
  TiltedScoreSampler(const mgf::ScoreModel& sm, double theta);

  double sample(Rng& rng) const;

  double theta() const noexcept { return theta_; }
  int max_length() const noexcept { return min_length_ + static_cast<int>(cdf_.size()) - 1; }
  /// Exact mean of the (truncated) tilted score law.
  double mean() const noexcept { return mean_; }

 private:
  int draw_length(Rng& rng) const;

  mgf::ScoreKind kind_;
  int L_;
  double theta_;
  int min_length_;
  std::vector<double> cdf_;  // cumulative unnormalised length weights
  double mean_ = 0.0;

  // BWS only.
  numeric::Mat4 q_;
  numeric::Vec4 v_;
  std::vector<numeric::Vec4> backward_;  // backward_[m] = Q^m u
  numeric::Mat4 log_t_;
  numeric::Vec4 log_v0_;
  numeric::Vec4 log_u0_;
};

/// One draw; builds a sampler each call, so prefer TiltedScoreSampler in loops.
double sample_tilted_score(const mgf::ScoreModel& sm, double theta, Rng& rng);

}  // namespace palinscan::sim
