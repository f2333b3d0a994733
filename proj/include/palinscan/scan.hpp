#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "palinscan/mgf.hpp"

namespace palinscan::scan {

struct ScoredPosition {
  std::size_t position = 0;
  double score = 0.0;
};

/// values[t] = sum of scores at positions in (t, t + w], t = 0 .. W - w;
/// counts[t] is the number of such positions.
struct WindowSeries {
  std::size_t w = 0;
  std::size_t W = 0;
  std::vector<double> values;
  std::vector<std::uint32_t> counts;
  std::size_t argmax = 0;
  double max = 0.0;
};

WindowSeries window_scores(std::vector<ScoredPosition> events, std::size_t w, std::size_t W);

/// Centring condition (a): PerBasePair solves w lambda1 phi'(theta1) = b with
/// rates per bp; Literal solves lambda1 phi'(theta1) = b as printed.
enum class TiltConvention { PerBasePair, Literal };

struct TiltSolution {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double theta0 = 0.0;
  double theta1 = 0.0;
  double b = 0.0;
  std::size_t w = 0;
  TiltConvention convention = TiltConvention::PerBasePair;
};

struct LlrStatistics {
  double pcs_llr = 0.0;       // max_t N_w(t) log(l1/l0) - (l1 - l0) w
  double weighted_llr = 0.0;  // max_t -(l1 - l0) w + (th1 - th0) S_w(t)
  std::size_t pcs_argmax = 0;
  std::size_t weighted_argmax = 0;
  std::uint32_t max_count = 0;
  double max_score = 0.0;
};

LlrStatistics llr_statistics(const WindowSeries& series, const TiltSolution& ts);

/// w lambda0 phi'(0): expected window score under the null.
double null_window_mean(double lambda0, const mgf::ScoreModel& sm, std::size_t w);

/// Solves conditions (a) and (b) with theta0 = 0: lambda1 = lambda0 exp(phi(theta1))
/// substituted into (a), root-found on [0, t_max).
TiltSolution solve_tilt(double lambda0, const mgf::ScoreModel& sm, double b, std::size_t w,
                        TiltConvention convention = TiltConvention::PerBasePair);

struct OvershootEstimate {
  double nu = 1.0;
  double se = 0.0;
  std::size_t walks = 0;
  std::size_t capped = 0;
};

/// Monte Carlo ladder-height estimate of
///   nu = (1 - E exp(-(th1 - th0) S_tau)) / ((1 - exp(-(th1 - th0))) E S_tau)
/// where S_n sums iid copies of y1 and tau is the first strict ascending
/// ladder epoch. Each walk owns a stream derived from (seed, walk index).
OvershootEstimate overshoot_nu(const TiltSolution& ts, const mgf::ScoreModel& sm, double delta,
                               std::size_t n_walks, std::uint64_t seed);

struct ScanOptions {
  TiltConvention tilt = TiltConvention::PerBasePair;
  /// Use the printed (b - lambda0 mu0) factor instead of E y1.
  bool literal_mean_factor = false;
  /// Use w lambda1 phi''(theta1) as the local variance instead of the
  /// compound-Poisson w lambda1 (phi'' + phi'^2); undefined for PCS.
  bool literal_variance = false;
  double delta = 1.0;
  std::size_t nu_walks = 100000;
  std::uint64_t nu_seed = 0x5eedULL;
  std::optional<double> nu_fixed;
};

struct PvalueReport {
  double b = 0.0;
  std::size_t w = 0;
  std::size_t W = 0;
  double p = 1.0;
  double nu = 1.0;
  double nu_se = 0.0;
  double i_b = 0.0;  // rate function I(b), per bp
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  double theta1 = 0.0;
  double mean_factor = 0.0;
  double exponent = 0.0;  // p = 1 - exp(-exponent) before clamping
};

PvalueReport p_value(double b, std::size_t w, std::size_t W, double lambda0,
                     const mgf::ScoreModel& sm, const ScanOptions& opts = {});

/// Largest b with p_value(b) = alpha; nu uses the same seed at every iterate.
double threshold_for_alpha(double alpha, std::size_t w, std::size_t W, double lambda0,
                           const mgf::ScoreModel& sm, const ScanOptions& opts = {});

struct ScanReport {
  WindowSeries series;
  double lambda0 = 0.0;
  mgf::ScoreKind kind = mgf::ScoreKind::PCS;
  std::size_t events = 0;
  /// True when the observed maximum does not exceed the null window mean;
  /// the report then carries p = 1 without solving the tilt.
  bool at_or_below_null = false;
  PvalueReport pvalue;
};

ScanReport scan_events(const std::vector<ScoredPosition>& events, std::size_t W, double lambda0,
                       const mgf::ScoreModel& sm, std::size_t w, const ScanOptions& opts = {});

/// {w, W, lambda0, kind, b, theta1, lambda1, nu, nu_se, p, argmax, max}.
std::string to_json(const ScanReport& report);
std::string series_to_tsv(const WindowSeries& series);

}  // namespace palinscan::scan
