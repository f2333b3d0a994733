#include <cmath>
#include <vector>

#include "doctest.h"
#include "palinscan/error.hpp"
#include "palinscan/sampler.hpp"

using namespace palinscan;
using namespace palinscan::mgf;
using palinscan::sim::TiltedScoreSampler;

namespace {

struct Moments {
  double mean = 0.0;
  double se = 0.0;
};

template <class F>
Moments moments(const TiltedScoreSampler& s, std::size_t n, std::uint64_t seed, F transform) {
  Rng rng(seed);
  double sum = 0.0;
  double sum2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = transform(s.sample(rng));
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = (sum2 - n * mean * mean) / (n - 1);
  return {mean, std::sqrt(var / n)};
}

const auto identity = [](double x) { return x; };

}  // namespace

TEST_CASE("PCS draws are always one") {
  const ScoreModel sm(ScoreKind::PCS, markov::bohv1_model(), 6);
  for (double theta : {0.0, 2.0}) {
    const TiltedScoreSampler s(sm, theta);
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) CHECK(s.sample(rng) == 1.0);
  }
}

TEST_CASE("untilted PLS mean matches phi'(0)") {
  const ScoreModel sm(ScoreKind::PLS, markov::bohv1_model(), 6);
  const TiltedScoreSampler s(sm, 0.0);
  const auto m = moments(s, 100000, 7, identity);
  CHECK(std::abs(m.mean - phi_prime(sm, 0.0)) < 3.0 * m.se);
  CHECK(s.mean() == doctest::Approx(phi_prime(sm, 0.0)).epsilon(1e-8));
  // Scores are k / L with k >= L.
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double x = s.sample(rng);
    CHECK(x >= 1.0);
    CHECK(std::abs(x * 6 - std::round(x * 6)) < 1e-12);
  }
}

TEST_CASE("untilted BWS empirical MGF matches k_bws") {
  const ScoreModel sm(ScoreKind::BWS, markov::bohv1_model(), 6);
  const TiltedScoreSampler s(sm, 0.0);
  for (double t : {0.02, 0.05}) {
    const auto m = moments(s, 100000, 11, [t](double x) { return std::exp(t * x); });
    CHECK(std::abs(m.mean - k_bws(sm, t)) < 3.0 * m.se);
  }
  const auto m = moments(s, 100000, 13, identity);
  CHECK(std::abs(m.mean - phi_prime(sm, 0.0)) < 3.0 * m.se);
}

TEST_CASE("tilted means match phi'(theta)") {
  const auto model = markov::bohv1_model();
  const ScoreModel pls(ScoreKind::PLS, model, 6);
  const ScoreModel bws(ScoreKind::BWS, model, 6);
  for (const auto& [sm, theta] : {std::pair{&pls, 1.5}, std::pair{&bws, 0.2}}) {
    const TiltedScoreSampler s(*sm, theta);
    const auto m = moments(s, 100000, 5, identity);
    CHECK(std::abs(m.mean - phi_prime(*sm, theta)) < 3.0 * m.se);
    CHECK(s.mean() == doctest::Approx(phi_prime(*sm, theta)).epsilon(1e-6));
  }
}

TEST_CASE("sampling is reproducible and domain-checked") {
  const ScoreModel sm(ScoreKind::BWS, markov::bohv1_model(), 6);
  const TiltedScoreSampler s(sm, 0.1);
  Rng a(99);
  Rng b(99);
  for (int i = 0; i < 100; ++i) CHECK(s.sample(a) == s.sample(b));
  Rng c(1);
  CHECK(sim::sample_tilted_score(sm, 0.1, c) > 0.0);
  CHECK_THROWS_AS(TiltedScoreSampler(sm, sm.domain().t_max + 0.01), Error);
}
