#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "doctest.h"
#include "palinscan/error.hpp"
#include "palinscan/palindrome.hpp"

using namespace palinscan;
using namespace palinscan::palindrome;

namespace {

std::string random_bases(std::mt19937_64& rng, std::size_t n, int alphabet = 4) {
  std::string s(n, 'A');
  for (auto& c : s) c = "ATCG"[rng() % static_cast<unsigned>(alphabet)];
  return s;
}

// Every even-length substring that equals its own reverse complement,
// reduced to the longest one per centre.
std::map<std::size_t, int> quadratic_oracle(const std::string& s, int L) {
  std::map<std::size_t, int> best;
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t len = 2; i + len <= n; len += 2) {
      const std::string sub = s.substr(i, len);
      if (reverse_complement(DnaSeq::from_bases(sub)).bases() != sub) continue;
      const std::size_t centre = i + len / 2 - 1;
      best[centre] = std::max(best[centre], static_cast<int>(len / 2));
    }
  std::map<std::size_t, int> out;
  for (auto [c, h] : best)
    if (h >= L) out[c] = h;
  return out;
}

std::string left_half(int k, long long code) {
  std::string s;
  for (int i = 0; i < k; ++i) {
    s += index_base(static_cast<int>(code & 3));
    code >>= 2;
  }
  return s;
}

std::string mirror(const std::string& left) {
  return left + reverse_complement(DnaSeq::from_bases(left)).bases();
}

}  // namespace

TEST_CASE("find_palindromes on a hand example") {
  // GAATTC (EcoRI) is a 3-bp half-length palindrome centred between the As and Ts.
  const auto ev = find_palindromes(DnaSeq::from_bases("CCGAATTCAA"), 3);
  REQUIRE(ev.size() == 1);
  CHECK(ev[0].center == 4);
  CHECK(ev[0].half_length == 3);
  CHECK(ev[0].pattern == "GAATTC");
  CHECK(find_palindromes(DnaSeq::from_bases("CCGAATTCAA"), 4).empty());
  CHECK(find_palindromes(DnaSeq::from_bases("A"), 1).empty());
  CHECK(find_palindromes(DnaSeq::from_bases(std::string(100, 'A')), 1).empty());
  CHECK_THROWS_AS(find_palindromes(DnaSeq::from_bases("ACGT"), 0), Error);
}

TEST_CASE("find_palindromes matches the quadratic oracle") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 40; ++trial) {
    // A two-letter complementary alphabet makes long palindromes common.
    const std::string s = random_bases(rng, 150, trial % 2 ? 2 : 4);
    for (int L : {1, 2, 4}) {
      const auto got = find_palindromes(DnaSeq::from_bases(s), L);
      const auto want = quadratic_oracle(s, L);
      REQUIRE(got.size() == want.size());
      for (const auto& e : got) {
        REQUIRE(want.count(e.center) == 1);
        CHECK(want.at(e.center) == e.half_length);
        CHECK(e.pattern == s.substr(e.center + 1 - e.half_length, 2 * e.half_length));
      }
    }
  }
}

TEST_CASE("pattern probabilities sum to the exact-length mass") {
  const auto m = markov::bohv1_model();
  for (int k = 1; k <= 6; ++k) {
    double sum = 0.0;
    for (long long code = 0; code < (1LL << (2 * k)); ++code)
      sum += pattern_probability(mirror(left_half(k, code)), m);
    const double want = markov::lambda_markov(m, k).lambda - markov::lambda_markov(m, k + 1).lambda;
    CHECK(sum == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK_THROWS_AS(pattern_probability("ACG", m), Error);
  CHECK_THROWS_AS(pattern_probability("", m), Error);
}

TEST_CASE("pattern probability by hand") {
  const auto m = markov::bohv1_model();
  const auto t = markov::build_quasi_T(m);
  // Half-length 2 pattern "AC|GT": (pi_A - sum_a pi_a T_aA) * T_AC * P_CG.
  double first = m.pi[0];
  for (std::size_t a = 0; a < 4; ++a) first -= m.pi[a] * t(a, 0);
  CHECK(pattern_probability("ACGT", m) == doctest::Approx(first * t(0, 1) * m.trans(1, 2)));
}

TEST_CASE("event scores") {
  const auto m = markov::bohv1_model();
  const PalindromeEvent real{10, 9, mirror("ACGTTAGCA")};
  CHECK(score_event(real, ScoreKind::PCS, 6, m) == 1.0);
  CHECK(score_event(real, ScoreKind::PLS, 6, m) == doctest::Approx(1.5));
  CHECK(score_event(real, ScoreKind::BWS, 6, m) ==
        doctest::Approx(-std::log(pattern_probability(real.pattern, m))));
  CHECK_THROWS_AS(score_event(real, ScoreKind::PLS, 10, m), Error);

  auto degenerate = m;
  for (std::size_t j = 0; j < 4; ++j) degenerate.trans(0, j) = j == 3 ? 1.0 : 0.0;
  const PalindromeEvent blocked{5, 2, mirror("AC")};
  try {
    score_event(blocked, ScoreKind::BWS, 2, degenerate);
    FAIL("expected an infinite score");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::InfiniteScore);
  }
}

TEST_CASE("bank, average rate and TSV") {
  const auto m = markov::bohv1_model();
  // Palindromes clump (GCGCGC... holds several overlapping centres), so the
  // count is over-dispersed relative to Poisson; compare the mean over
  // replicates with its empirical standard error.
  const double expected = markov::kBohv1Length * markov::lambda_markov(m, 6).lambda;
  std::vector<double> counts;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng r(seed);
    counts.push_back(static_cast<double>(
        find_palindromes(markov::generate_sequence(m, markov::kBohv1Length, r), 6).size()));
  }
  double mean = 0.0;
  for (double c : counts) mean += c / counts.size();
  double var = 0.0;
  for (double c : counts) var += (c - mean) * (c - mean) / (counts.size() - 1);
  CHECK(std::abs(mean - expected) < 3.0 * std::sqrt(var / counts.size()));

  Rng rng(3);
  const auto s = markov::generate_sequence(m, markov::kBohv1Length, rng);
  const auto events = find_palindromes(s, 6);

  const auto bank = build_bank(s, 6);
  CHECK(bank.patterns.size() == events.size());
  CHECK(bank.L == 6);
  for (const auto& p : bank.patterns) CHECK(reverse_complement(DnaSeq::from_bases(p)).bases() == p);
  CHECK_THROWS_AS(build_bank(DnaSeq::from_bases(std::string(50, 'A')), 6), Error);

  const auto r = average_rate(events, s.length(), 6);
  CHECK(r.lambda == doctest::Approx(events.size() / static_cast<double>(s.length())));
  CHECK(r.method == markov::RateMethod::Average);
  CHECK_THROWS_AS(average_rate(events, 0), Error);

  const std::string tsv = events_to_tsv({events.front()}, 6, m);
  CHECK(tsv.rfind("center\thalf_length\tpattern\tpcs\tpls\tbws\n", 0) == 0);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') == 2);
}

TEST_CASE("score kind names") {
  for (auto k : {ScoreKind::PCS, ScoreKind::PLS, ScoreKind::BWS})
    CHECK(parse_score_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_score_kind("xyz"), Error);
}
