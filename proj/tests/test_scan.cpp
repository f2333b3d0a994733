#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "json.hpp"
#include "palinscan/error.hpp"
#include "palinscan/scan.hpp"

using namespace palinscan;
using namespace palinscan::scan;
using mgf::ScoreKind;
using mgf::ScoreModel;

namespace {

const markov::MarkovModel& model() {
  static const auto m = markov::bohv1_model();
  return m;
}

double lambda0() { return markov::lambda_markov(model(), 6).lambda; }

std::vector<double> resum(const std::vector<ScoredPosition>& ev, std::size_t w, std::size_t W) {
  std::vector<double> out(W - w + 1, 0.0);
  for (std::size_t t = 0; t < out.size(); ++t)
    for (const auto& e : ev)
      if (e.position > t && e.position <= t + w) out[t] += e.score;
  return out;
}

// PCS p-value written out in closed form (phi = theta, phi' = 1, phi'' = 0).
double pcs_p(double b, double w, double W, double l0, double nu) {
  const double l1 = b / w;
  const double th = std::log(l1 / l0);
  const double iw = b * th - w * (l1 - l0);
  return -std::expm1(-(W - w) * nu * (l1 - l0) * std::exp(-iw) / std::sqrt(2 * M_PI * w * l1));
}

}  // namespace

TEST_CASE("window_scores trivial cases") {
  const auto empty = window_scores({}, 100, 1000);
  CHECK(empty.values.size() == 901);
  CHECK(empty.max == 0.0);
  CHECK(empty.argmax == 0);

  const auto one = window_scores({{500, 2.5}}, 1000, 5000);
  for (std::size_t t = 0; t < one.values.size(); ++t) CHECK(one.values[t] == (t < 500 ? 2.5 : 0.0));
  CHECK(one.max == 2.5);
  CHECK(one.argmax == 0);

  CHECK_THROWS_AS(window_scores({{1000, 1.0}}, 10, 1000), Error);
  CHECK_THROWS_AS(window_scores({}, 0, 10), Error);
  CHECK_THROWS_AS(window_scores({}, 11, 10), Error);
}

TEST_CASE("window_scores matches re-summation") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> score(0.1, 5.0);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t W = 200 + rng() % 300;
    const std::size_t w = 1 + rng() % 60;
    std::vector<ScoredPosition> ev;
    for (int i = 0, n = static_cast<int>(rng() % 40); i < n; ++i) ev.push_back({rng() % W, score(rng)});
    const auto s = window_scores(ev, w, W);
    const auto want = resum(ev, w, W);
    for (std::size_t t = 0; t < want.size(); ++t) CHECK(s.values[t] == doctest::Approx(want[t]).epsilon(1e-12));
    const auto it = std::max_element(want.begin(), want.end());
    CHECK(s.max == doctest::Approx(*it));
  }
}

TEST_CASE("unit scores: max S equals max count") {
  std::mt19937_64 rng(4);
  std::vector<ScoredPosition> ev;
  for (int i = 0; i < 200; ++i) ev.push_back({rng() % 5000, 1.0});
  const auto s = window_scores(ev, 250, 5000);
  std::uint32_t max_count = 0;
  for (auto c : s.counts) max_count = std::max(max_count, c);
  CHECK(s.max == static_cast<double>(max_count));
}

TEST_CASE("llr statistics") {
  const auto s = window_scores({{10, 2.0}, {15, 3.0}, {40, 1.0}}, 10, 60);
  TiltSolution null;
  null.lambda0 = null.lambda1 = 0.01;
  null.w = 10;
  const auto z = llr_statistics(s, null);
  CHECK(z.pcs_llr == 0.0);
  CHECK(z.weighted_llr == 0.0);

  TiltSolution ts;
  ts.lambda0 = 0.01;
  ts.lambda1 = 0.05;
  ts.theta1 = 0.8;
  ts.w = 10;
  const auto r = llr_statistics(s, ts);
  // Windows (t, t+10] with t in [5, 9] hold both 10 and 15: S = 5, N = 2.
  CHECK(r.max_count == 2);
  CHECK(r.max_score == 5.0);
  CHECK(r.pcs_llr == doctest::Approx(2 * std::log(5.0) - 0.4));
  CHECK(r.weighted_llr == doctest::Approx(-0.4 + 0.8 * 5.0));
  CHECK(r.weighted_argmax == s.argmax);
  TiltSolution wrong = ts;
  wrong.w = 11;
  CHECK_THROWS_AS(llr_statistics(s, wrong), Error);
}

TEST_CASE("solve_tilt") {
  const double l0 = lambda0();
  SUBCASE("boundary at the null mean") {
    const ScoreModel sm(ScoreKind::PLS, model(), 6);
    const auto ts = solve_tilt(l0, sm, null_window_mean(l0, sm, 1000), 1000);
    CHECK(ts.theta1 == 0.0);
    CHECK(ts.lambda1 == l0);
    CHECK_THROWS_AS(solve_tilt(l0, sm, 0.5 * null_window_mean(l0, sm, 1000), 1000), Error);
  }
  SUBCASE("residuals") {
    for (auto kind : {ScoreKind::PLS, ScoreKind::BWS}) {
      const ScoreModel sm(kind, model(), 6);
      const double mean = null_window_mean(l0, sm, 1000);
      for (double f : {1.5, 3.0, 6.0}) {
        const double b = f * mean;
        const auto ts = solve_tilt(l0, sm, b, 1000);
        CHECK(std::abs(1000 * ts.lambda1 * mgf::phi_prime(sm, ts.theta1) - b) < 1e-8 * b);
        CHECK(std::abs(std::log(ts.lambda1 / ts.lambda0) - mgf::phi(sm, ts.theta1)) < 1e-8);
      }
      const auto lit = solve_tilt(l0, sm, 3.0 * l0 * mgf::phi_prime(sm, 0.0), 1000, TiltConvention::Literal);
      CHECK(lit.lambda1 * mgf::phi_prime(sm, lit.theta1) ==
            doctest::Approx(3.0 * l0 * mgf::phi_prime(sm, 0.0)).epsilon(1e-8));
    }
  }
  SUBCASE("PCS closed form") {
    const ScoreModel sm(ScoreKind::PCS, model(), 6);
    for (double b : {2.0, 5.0, 12.0}) {
      const auto ts = solve_tilt(l0, sm, b, 1000);
      CHECK(std::abs(ts.lambda1 - b / 1000) < 1e-10 * (b / 1000));
      CHECK(std::abs(ts.theta1 - std::log(b / 1000 / l0)) < 1e-10);
    }
  }
  SUBCASE("unreachable threshold") {
    const ScoreModel sm(ScoreKind::BWS, model(), 6);
    try {
      solve_tilt(l0, sm, 1e9, 1000);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Unattainable);
    }
  }
}

TEST_CASE("overshoot nu") {
  const double l0 = lambda0();
  for (auto kind : {ScoreKind::PCS, ScoreKind::PLS, ScoreKind::BWS}) {
    const ScoreModel sm(kind, model(), 6);
    const auto ts = solve_tilt(l0, sm, 4.0 * null_window_mean(l0, sm, 1000), 1000);
    const auto a = overshoot_nu(ts, sm, 1.0, 20000, 1);
    const auto b = overshoot_nu(ts, sm, 1.0, 20000, 2);
    CHECK(a.nu > 0.0);
    CHECK(a.nu <= 1.0);
    CHECK(std::abs(a.nu - b.nu) <= 3.0 * std::hypot(a.se, b.se) + 1e-12);
    CHECK(a.capped == 0);
    const auto again = overshoot_nu(ts, sm, 1.0, 20000, 1);
    CHECK(again.nu == a.nu);
  }
  SUBCASE("PCS small-rate limit") {
    const ScoreModel sm(ScoreKind::PCS, model(), 6);
    TiltSolution ts;
    ts.lambda0 = 1e-6;
    ts.theta1 = 1.0;
    ts.lambda1 = 1e-6 * std::exp(1.0);
    ts.w = 1000;
    const auto r = overshoot_nu(ts, sm, 1.0, 20000, 3);
    CHECK(std::abs(r.nu - 1.0) <= 3.0 * r.se + 1e-12);
  }
  TiltSolution flat;
  flat.lambda0 = flat.lambda1 = 0.001;
  CHECK_THROWS_AS(overshoot_nu(flat, ScoreModel(ScoreKind::PLS, model(), 6), 1.0, 100, 1), Error);
}

TEST_CASE("p-value shape") {
  const double l0 = lambda0();
  const ScoreModel sm(ScoreKind::PLS, model(), 6);
  ScanOptions fixed;
  fixed.nu_fixed = 1.0;
  const double mean = null_window_mean(l0, sm, 1000);
  // The exponent falls with b above its peak; check a grid across the upper tail.
  double prev = std::numeric_limits<double>::infinity();
  for (double b = 4.0 * mean; b < 14.0 * mean; b += 0.5 * mean) {
    const auto r = p_value(b, 1000, 135301, l0, sm, fixed);
    CHECK(r.p >= 0.0);
    CHECK(r.p <= 1.0);
    CHECK(r.exponent < prev);
    prev = r.exponent;
  }
  CHECK(p_value(0.99 * (1000 * l0 * std::exp(mgf::phi(sm, 6.8)) * mgf::phi_prime(sm, 6.8)), 1000,
                135301, l0, sm, fixed).p < 1e-12);
  const double b = 6.0 * mean;
  CHECK(p_value(b, 1000, 50000, l0, sm, fixed).p <= p_value(b, 1000, 135301, l0, sm, fixed).p);

  ScanOptions mc;
  mc.nu_walks = 20000;
  double prev_p = 1.0;
  for (double f : {5.0, 6.0, 7.0, 8.0}) {
    const double p = p_value(f * mean, 1000, 135301, l0, sm, mc).p;
    CHECK(p < prev_p);
    prev_p = p;
  }
  CHECK_THROWS_AS(p_value(b, 1000, 1000, l0, sm, fixed), Error);
}

TEST_CASE("threshold_for_alpha") {
  const double l0 = lambda0();
  ScanOptions opts;
  opts.nu_walks = 20000;
  for (auto kind : {ScoreKind::PLS, ScoreKind::BWS}) {
    const ScoreModel sm(kind, model(), 6);
    const double b = threshold_for_alpha(0.05, 1000, 135301, l0, sm, opts);
    CHECK(std::abs(p_value(b, 1000, 135301, l0, sm, opts).p - 0.05) < 1e-4);
    const double higher = threshold_for_alpha(0.05, 1000, 135301, 1.3 * l0, sm, opts);
    CHECK(higher > b);
  }
  SUBCASE("PCS closed form") {
    const ScoreModel sm(ScoreKind::PCS, model(), 6);
    ScanOptions fixed;
    fixed.nu_fixed = 1.0;
    const double got = threshold_for_alpha(0.05, 1000, 135301, l0, sm, fixed);
    // Bisection on the decreasing branch of the closed form.
    double lo = 2.0;
    double hi = 100.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (pcs_p(mid, 1000, 135301, l0, 1.0) > 0.05 ? lo : hi) = mid;
    }
    CHECK(std::abs(got - 0.5 * (lo + hi)) < 1e-6);
    CHECK(std::abs(p_value(got, 1000, 135301, l0, sm, fixed).p - pcs_p(got, 1000, 135301, l0, 1.0)) < 1e-12);
  }
  const ScoreModel sm(ScoreKind::PLS, model(), 6);
  CHECK_THROWS_AS(threshold_for_alpha(0.0, 1000, 135301, l0, sm, opts), Error);
  CHECK_THROWS_AS(threshold_for_alpha(1.0, 1000, 135301, l0, sm, opts), Error);
}

TEST_CASE("scan_events report") {
  const double l0 = lambda0();
  const ScoreModel sm(ScoreKind::PLS, model(), 6);
  const auto none = scan_events({}, 10000, l0, sm, 1000);
  CHECK(none.at_or_below_null);
  CHECK(none.pvalue.p == 1.0);
  CHECK(none.series.max == 0.0);

  std::vector<ScoredPosition> ev;
  for (std::size_t i = 0; i < 12; ++i) ev.push_back({5000 + 20 * i, 1.5});
  ScanOptions fixed;
  fixed.nu_fixed = 1.0;
  const auto r = scan_events(ev, 20000, l0, sm, 1000, fixed);
  CHECK_FALSE(r.at_or_below_null);
  CHECK(r.series.max == doctest::Approx(18.0));
  CHECK(r.pvalue.p < 1e-3);
  const auto j = nlohmann::json::parse(to_json(r));
  for (const char* key : {"w", "W", "lambda0", "kind", "b", "theta1", "lambda1", "nu", "nu_se", "p", "argmax", "max"})
    CHECK(j.contains(key));
  CHECK(j["kind"] == "pls");
  const std::string tsv = series_to_tsv(r.series);
  CHECK(tsv.rfind("t\tcount\tscore\n", 0) == 0);
}
