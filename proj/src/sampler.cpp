#include "palinscan/sampler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "palinscan/error.hpp"

namespace palinscan::sim {

namespace {

constexpr double kTailMass = 1e-12;
constexpr std::size_t kMaxLengths = 200000;

double safe_log(double x) {
  return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
}

}  // namespace

TiltedScoreSampler::TiltedScoreSampler(const mgf::ScoreModel& sm, double theta)
    : kind_(sm.kind()), L_(sm.L()), theta_(theta), min_length_(sm.L()) {
  if (kind_ == mgf::ScoreKind::PCS) {
    mean_ = 1.0;
    return;
  }
  // Analytic total mass of lengths >= L, used as the truncation target.
  const double total = sm.mgf(theta) * sm.event_rate();

  if (kind_ == mgf::ScoreKind::BWS) {
    q_ = sm.tilted_T(theta);
    v_ = sm.tilted_first_factor(theta);
    const numeric::Vec4 u = sm.tilted_closure(theta);
    for (std::size_t i = 0; i < 16; ++i) log_t_.a[i] = safe_log(sm.quasi_T().a[i]);
    for (std::size_t i = 0; i < 4; ++i) {
      log_v0_[i] = safe_log(sm.first_factor()[i]);
      log_u0_[i] = safe_log(sm.closure()[i]);
    }
    backward_.push_back(u);
  }

  double acc = 0.0;
  double moment = 0.0;
  numeric::Vec4 row;  // v' Q^(k-1) for BWS
  if (kind_ == mgf::ScoreKind::BWS) row = v_;
  for (int k = 1; cdf_.size() < kMaxLengths; ++k) {
    if (kind_ == mgf::ScoreKind::BWS) {
      if (k > 1) {
        row = row * q_;
        backward_.push_back(q_ * backward_.back());
      }
      if (k < min_length_) continue;
    } else if (k < min_length_) {
      continue;
    }
    const double w = kind_ == mgf::ScoreKind::BWS ? numeric::dot(row, backward_.front())
                                                  : sm.exact_length(theta, k);
    acc += w;
    cdf_.push_back(acc);
    if (kind_ == mgf::ScoreKind::PLS) moment += w * static_cast<double>(k) / L_;
    if (acc >= (1.0 - kTailMass) * total) break;
  }
  if (acc < (1.0 - 1e-6) * total)
    fail(ErrorCode::Domain, "tilted sampler: length distribution too heavy-tailed at theta = " +
                                std::to_string(theta));
  if (kind_ == mgf::ScoreKind::PLS) {
    mean_ = moment / acc;
  } else {
    mean_ = mgf::phi_prime(sm, theta);
  }
}

int TiltedScoreSampler::draw_length(Rng& rng) const {
  const double target = uniform01(rng) * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
  const auto idx = std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                            static_cast<std::ptrdiff_t>(cdf_.size()) - 1);
  return min_length_ + static_cast<int>(idx);
}

double TiltedScoreSampler::sample(Rng& rng) const {
  switch (kind_) {
    case mgf::ScoreKind::PCS:
      return 1.0;
    case mgf::ScoreKind::PLS:
      return static_cast<double>(draw_length(rng)) / L_;
    case mgf::ScoreKind::BWS: {
      const int k = draw_length(rng);
      auto pick = [&](const std::array<double, 4>& w) {
        const double total = w[0] + w[1] + w[2] + w[3];
        const double u = uniform01(rng) * total;
        double acc = 0.0;
        for (int i = 0; i < 3; ++i) {
          acc += w[static_cast<std::size_t>(i)];
          if (u < acc) return i;
        }
        return 3;
      };
      const auto& tail = backward_[static_cast<std::size_t>(k - 1)];
      std::array<double, 4> w{};
      for (std::size_t i = 0; i < 4; ++i) w[i] = v_[i] * tail[i];
      int a = pick(w);
      double log_p = log_v0_[static_cast<std::size_t>(a)];
      for (int j = 1; j < k; ++j) {
        const auto& next_tail = backward_[static_cast<std::size_t>(k - j - 1)];
        for (std::size_t b = 0; b < 4; ++b) w[b] = q_(static_cast<std::size_t>(a), b) * next_tail[b];
        const int b = pick(w);
        log_p += log_t_(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
        a = b;
      }
      log_p += log_u0_[static_cast<std::size_t>(a)];
      return -log_p;
    }
  }
  return 0.0;
}

double sample_tilted_score(const mgf::ScoreModel& sm, double theta, Rng& rng) {
  return TiltedScoreSampler(sm, theta).sample(rng);
}

}  // namespace palinscan::sim
