#include "palinscan/palindrome.hpp"

#include <cmath>
#include <cstdio>

#include "palinscan/error.hpp"

namespace palinscan::palindrome {

const char* to_string(ScoreKind k) noexcept {
  switch (k) {
    case ScoreKind::PCS: return "pcs";
    case ScoreKind::PLS: return "pls";
    case ScoreKind::BWS: return "bws";
  }
  return "?";
}

ScoreKind parse_score_kind(const std::string& name) {
  if (name == "pcs" || name == "PCS") return ScoreKind::PCS;
  if (name == "pls" || name == "PLS") return ScoreKind::PLS;
  if (name == "bws" || name == "BWS") return ScoreKind::BWS;
  fail(ErrorCode::InvalidArgument, "unknown score kind '" + name + "'");
}

std::vector<PalindromeEvent> find_palindromes(const DnaSeq& s, int L) {
  if (L < 1) fail(ErrorCode::InvalidArgument, "find_palindromes: L must be >= 1");
  std::vector<PalindromeEvent> events;
  const auto& b = s.bases();
  const std::size_t n = b.size();
  if (n < 2) return events;
  const std::size_t need = static_cast<std::size_t>(L);
  for (std::size_t c = 0; c + 1 < n; ++c) {
    // Cheap rejection before extending: the innermost pair must match.
    if (b[c] != complement(b[c + 1])) continue;
    std::size_t h = 1;
    while (h <= c && c + 1 + h < n && b[c - h] == complement(b[c + 1 + h])) ++h;
    if (h >= need)
      events.push_back({c, static_cast<int>(h), b.substr(c + 1 - h, 2 * h)});
  }
  return events;
}

double pattern_probability(const std::string& pattern, const markov::MarkovModel& m) {
  const std::size_t k = pattern.size() / 2;
  if (k == 0 || pattern.size() % 2 != 0)
    fail(ErrorCode::InvalidArgument, "pattern must have positive even length");
  const numeric::Mat4 t = markov::build_quasi_T(m);
  int a = base_index(pattern[0]);
  if (a < 0) fail(ErrorCode::InvalidArgument, "pattern has invalid base");
  // pi_a1 minus the mass that extends one further step outward.
  double first = m.pi[static_cast<std::size_t>(a)];
  for (std::size_t a0 = 0; a0 < 4; ++a0) first -= m.pi[a0] * t(a0, static_cast<std::size_t>(a));
  double p = first;
  for (std::size_t j = 1; j < k; ++j) {
    const int next = base_index(pattern[j]);
    if (next < 0) fail(ErrorCode::InvalidArgument, "pattern has invalid base");
    p *= t(static_cast<std::size_t>(a), static_cast<std::size_t>(next));
    a = next;
  }
  p *= m.trans(static_cast<std::size_t>(a), static_cast<std::size_t>(complement_index(a)));
  return p;
}

double score_event(const PalindromeEvent& e, ScoreKind kind, int L,
                   const markov::MarkovModel& m) {
  if (L < 1 || e.half_length < L)
    fail(ErrorCode::InvalidArgument, "score_event: event shorter than L");
  switch (kind) {
    case ScoreKind::PCS: return 1.0;
    case ScoreKind::PLS: return static_cast<double>(e.half_length) / L;
    case ScoreKind::BWS: {
      const double p = pattern_probability(e.pattern, m);
      if (!(p > 0.0))
        fail(ErrorCode::InfiniteScore, "BWS: pattern " + e.pattern + " has zero probability");
      return -std::log(p);
    }
  }
  fail(ErrorCode::InvalidArgument, "score_event: unknown kind");
}

PalindromeBank build_bank(const DnaSeq& s, int L) {
  PalindromeBank bank;
  bank.source_id = s.source_id();
  bank.L = L;
  for (auto& e : find_palindromes(s, L)) bank.patterns.push_back(std::move(e.pattern));
  if (bank.patterns.empty())
    fail(ErrorCode::Empty, "palindrome bank is empty: no palindromes with half-length >= " +
                               std::to_string(L));
  return bank;
}

markov::RateEstimate average_rate(const std::vector<PalindromeEvent>& events,
                                  std::size_t seq_length, int L) {
  if (seq_length == 0) fail(ErrorCode::InvalidArgument, "average_rate: zero sequence length");
  return {static_cast<double>(events.size()) / static_cast<double>(seq_length),
          markov::RateMethod::Average, L};
}

std::string events_to_tsv(const std::vector<PalindromeEvent>& events, int L,
                          const markov::MarkovModel& m) {
  std::string out = "center\thalf_length\tpattern\tpcs\tpls\tbws\n";
  char buf[96];
  for (const auto& e : events) {
    std::snprintf(buf, sizeof buf, "%zu\t%d\t", e.center, e.half_length);
    out += buf;
    out += e.pattern;
    std::snprintf(buf, sizeof buf, "\t%.12g\t%.12g\t%.12g\n",
                  score_event(e, ScoreKind::PCS, L, m), score_event(e, ScoreKind::PLS, L, m),
                  score_event(e, ScoreKind::BWS, L, m));
    out += buf;
  }
  return out;
}

}  // namespace palinscan::palindrome
