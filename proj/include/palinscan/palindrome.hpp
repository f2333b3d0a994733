#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "palinscan/markov.hpp"
#include "palinscan/seqio.hpp"

namespace palinscan::palindrome {

enum class ScoreKind { PCS, PLS, BWS };

const char* to_string(ScoreKind k) noexcept;
ScoreKind parse_score_kind(const std::string& name);

/// A maximal even-length palindrome. `center` is the 0-based index of the
/// base left of the centre; the palindrome spans
/// [center - half_length + 1, center + half_length].
struct PalindromeEvent {
  std::size_t center = 0;
  int half_length = 0;
  std::string pattern;

  friend bool operator==(const PalindromeEvent&, const PalindromeEvent&) = default;
};

struct PalindromeBank {
  std::vector<std::string> patterns;
  std::string source_id;
  int L = 0;
};

/// One event per inter-base centre whose maximal half-length is >= L,
/// sorted by centre.
std::vector<PalindromeEvent> find_palindromes(const DnaSeq& s, int L);

/// Exact probability of `pattern` occurring with exactly its half-length
/// at a centre: the maximality-corrected first factor, the mirrored step
/// products, and the centre closure.
double pattern_probability(const std::string& pattern, const markov::MarkovModel& m);

/// PCS -> 1, PLS -> h / L, BWS -> -ln pattern_probability.
double score_event(const PalindromeEvent& e, ScoreKind kind, int L,
                   const markov::MarkovModel& m);

PalindromeBank build_bank(const DnaSeq& s, int L);

markov::RateEstimate average_rate(const std::vector<PalindromeEvent>& events,
                                  std::size_t seq_length, int L = 0);

/// TSV with header: center, half_length, pattern, pcs, pls, bws.
std::string events_to_tsv(const std::vector<PalindromeEvent>& events, int L,
                          const markov::MarkovModel& m);

}  // namespace palinscan::palindrome
