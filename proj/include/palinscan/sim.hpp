#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "palinscan/markov.hpp"
#include "palinscan/palindrome.hpp"
#include "palinscan/random.hpp"
#include "palinscan/sampler.hpp"
#include "palinscan/scan.hpp"

namespace palinscan::sim {

struct HotspotSpec {
  std::size_t start = 0;
  std::size_t length = 1000;
  double multiplier = 1.0;
};

/// Three segments centred at 25%, 50% and 75% of a sequence of length n.
std::vector<HotspotSpec> default_hotspots(std::size_t n, const std::array<double, 3>& multipliers,
                                          std::size_t length = 1000);

/// Bounds, overlap and multiplier checks; throws InvalidArgument.
void validate_hotspots(const std::vector<HotspotSpec>& specs, std::size_t n);

struct Insertion {
  DnaSeq sequence;
  /// Centres (index of the left middle base) of every inserted pattern.
  std::vector<std::size_t> truth;
};

/// Overwrites Poisson(length * multiplier * lambda0) bank patterns into each
/// segment at non-overlapping uniform positions.
Insertion insert_hotspots(const DnaSeq& background, const std::vector<HotspotSpec>& specs,
                          const palindrome::PalindromeBank& bank, double lambda0, Rng& rng);

/// Poisson draw by sequential inversion; suited to the small means used here.
std::uint64_t poisson(double mean, Rng& rng);

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Exceptions from workers are rethrown on the caller.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

struct ExperimentConfig {
  markov::MarkovModel model = markov::bohv1_model();
  std::size_t n = markov::kBohv1Length;
  int L = 6;
  std::size_t w = 1000;
  std::size_t replicates = 500;
  std::array<double, 3> multipliers{1.0, 1.0, 1.0};
  std::size_t hotspot_length = 1000;
  /// Overrides the default 25/50/75% layout when non-empty.
  std::vector<HotspotSpec> hotspots;
  double lambda0_target = 0.00098;
  std::uint64_t master_seed = 20090601;
  unsigned threads = 0;

  void validate() const;
  std::vector<HotspotSpec> layout() const;
};

/// Palindrome bank harvested from one sequence simulated under cfg.model
/// with its own seed stream; used when no bank is supplied.
palindrome::PalindromeBank default_bank(const ExperimentConfig& cfg);

/// One simulated genome with hot spots and its detected palindromes.
struct Replicate {
  DnaSeq sequence;
  std::vector<std::size_t> truth;
  std::vector<palindrome::PalindromeEvent> events;
  double lambda_average = 0.0;
  double lambda_markov = 0.0;
};

Replicate make_replicate(const ExperimentConfig& cfg, const palindrome::PalindromeBank& bank,
                         std::size_t index);

struct RateRow {
  std::array<double, 3> multipliers{};
  std::size_t replicates = 0;
  double mean_average = 0.0;
  double mean_markov = 0.0;
  double se_average = 0.0;
  double se_markov = 0.0;
  /// lambda_markov of the generating model.
  double true_lambda = 0.0;
  /// Per-replicate estimates in replicate order.
  std::vector<double> replicate_average;
  std::vector<double> replicate_markov;
};

RateRow rate_experiment(const ExperimentConfig& cfg,
                        const std::optional<palindrome::PalindromeBank>& bank = std::nullopt);

struct PowerOptions {
  palindrome::ScoreKind kind = palindrome::ScoreKind::PLS;
  double alpha = 0.05;
  /// Threshold per replicate from that replicate's own rate estimates
  /// instead of once from the scenario averages.
  bool per_replicate = false;
  /// Injected thresholds {average-rate, Markov-rate}; skip threshold_for_alpha.
  std::optional<std::array<double, 2>> fixed_thresholds;
  scan::ScanOptions scan;
};

struct PowerRow {
  std::array<double, 3> multipliers{};
  palindrome::ScoreKind kind = palindrome::ScoreKind::PLS;
  std::string estimator;  // "average" or "markov"
  double lambda0 = 0.0;   // rate estimate behind the threshold (scenario mean)
  double threshold = 0.0; // mean threshold across replicates in per-replicate mode
  std::vector<double> power;
  std::size_t replicates = 0;
  /// Threshold applied to each replicate.
  std::vector<double> replicate_threshold;
  /// detected[i * segments + s] is 1 when replicate i detected segment s.
  std::vector<std::uint8_t> detected;
};

/// Rows for the average-rate and Markov-rate estimators, in that order.
std::vector<PowerRow> power_experiment(
    const ExperimentConfig& cfg, const PowerOptions& opts,
    const std::optional<palindrome::PalindromeBank>& bank = std::nullopt);

/// True when some window overlapping [spec.start, spec.start + length) reaches b.
bool segment_detected(const scan::WindowSeries& series, const HotspotSpec& spec, double b);

/// Scores events at their centres for the window scan.
std::vector<scan::ScoredPosition> scored_positions(
    const std::vector<palindrome::PalindromeEvent>& events, palindrome::ScoreKind kind, int L,
    const markov::MarkovModel& m);

/// max_t S_w(t) for `replicates` hot-spot-free sequences from cfg.model.
std::vector<double> null_scan_maxima(const ExperimentConfig& cfg, palindrome::ScoreKind kind);

std::string rate_table_tsv(const std::vector<RateRow>& rows);
std::string power_table_tsv(const std::vector<PowerRow>& rows);

}  // namespace palinscan::sim
