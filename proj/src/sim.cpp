#include "palinscan/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "palinscan/error.hpp"

namespace palinscan::sim {

namespace {

constexpr std::uint64_t kBankStream = ~0ULL;
constexpr int kMaxPlacementRetries = 1000;

double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double standard_error(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

}  // namespace

std::vector<HotspotSpec> default_hotspots(std::size_t n, const std::array<double, 3>& multipliers,
                                          std::size_t length) {
  if (n < 4 * length)
    fail(ErrorCode::InvalidArgument, "default_hotspots: sequence too short for three segments");
  std::vector<HotspotSpec> specs;
  for (int i = 0; i < 3; ++i) {
    const std::size_t centre = n * static_cast<std::size_t>(i + 1) / 4;
    specs.push_back({centre - length / 2, length, multipliers[i]});
  }
  return specs;
}

void validate_hotspots(const std::vector<HotspotSpec>& specs, std::size_t n) {
  for (const auto& s : specs) {
    if (s.length == 0 || s.start + s.length > n)
      fail(ErrorCode::InvalidArgument, "hot spot segment outside the sequence");
    if (!(s.multiplier >= 1.0)) fail(ErrorCode::InvalidArgument, "hot spot multiplier must be >= 1");
  }
  for (std::size_t i = 0; i < specs.size(); ++i)
    for (std::size_t j = i + 1; j < specs.size(); ++j) {
      const auto& a = specs[i];
      const auto& b = specs[j];
      if (a.start < b.start + b.length && b.start < a.start + a.length)
        fail(ErrorCode::InvalidArgument, "hot spot segments overlap");
    }
}

std::uint64_t poisson(double mean, Rng& rng) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    fail(ErrorCode::InvalidArgument, "poisson: mean must be finite and non-negative");
  // Split large means so exp(-mean) stays well away from underflow.
  std::uint64_t total = 0;
  while (mean > 64.0) {
    total += poisson(64.0, rng);
    mean -= 64.0;
  }
  const double u = uniform01(rng);
  double p = std::exp(-mean);
  double cdf = p;
  std::uint64_t k = 0;
  while (u >= cdf && p > 0.0) {
    ++k;
    p *= mean / static_cast<double>(k);
    cdf += p;
  }
  return total + k;
}

Insertion insert_hotspots(const DnaSeq& background, const std::vector<HotspotSpec>& specs,
                          const palindrome::PalindromeBank& bank, double lambda0, Rng& rng) {
  if (bank.patterns.empty()) fail(ErrorCode::Empty, "insert_hotspots: palindrome bank is empty");
  if (!(lambda0 >= 0.0)) fail(ErrorCode::InvalidArgument, "insert_hotspots: negative rate");
  validate_hotspots(specs, background.length());

  Insertion out{background, {}};
  for (const auto& spec : specs) {
    const auto count = poisson(static_cast<double>(spec.length) * spec.multiplier * lambda0, rng);
    std::vector<std::pair<std::size_t, std::size_t>> placed;  // [begin, end)
    for (std::uint64_t k = 0; k < count; ++k) {
      bool done = false;
      for (int attempt = 0; attempt < kMaxPlacementRetries && !done; ++attempt) {
        const auto& pattern =
            bank.patterns[static_cast<std::size_t>(uniform01(rng) * bank.patterns.size())];
        if (pattern.size() > spec.length) continue;
        const std::size_t slots = spec.length - pattern.size() + 1;
        const std::size_t begin =
            spec.start + static_cast<std::size_t>(uniform01(rng) * static_cast<double>(slots));
        const std::size_t end = begin + pattern.size();
        const bool clash = std::any_of(placed.begin(), placed.end(), [&](const auto& iv) {
          return begin < iv.second && iv.first < end;
        });
        if (clash) continue;
        placed.emplace_back(begin, end);
        out.sequence.overwrite(begin, pattern);
        out.truth.push_back(begin + pattern.size() / 2 - 1);
        done = true;
      }
      if (!done)
        fail(ErrorCode::InvalidArgument,
             "insert_hotspots: segment at " + std::to_string(spec.start) + " too crowded for " +
                 std::to_string(count) + " patterns");
    }
  }
  std::sort(out.truth.begin(), out.truth.end());
  return out;
}

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

void ExperimentConfig::validate() const {
  model.validate();
  if (L < 1) fail(ErrorCode::InvalidArgument, "experiment: L must be >= 1");
  if (replicates < 1) fail(ErrorCode::InvalidArgument, "experiment: replicates must be >= 1");
  if (w < 1 || w >= n) fail(ErrorCode::InvalidArgument, "experiment: need 1 <= w < n");
  if (!(lambda0_target >= 0.0)) fail(ErrorCode::InvalidArgument, "experiment: negative lambda0");
  for (double a : multipliers)
    if (!(a >= 1.0)) fail(ErrorCode::InvalidArgument, "experiment: multipliers must be >= 1");
  validate_hotspots(layout(), n);
}

std::vector<HotspotSpec> ExperimentConfig::layout() const {
  return hotspots.empty() ? default_hotspots(n, multipliers, hotspot_length) : hotspots;
}

palindrome::PalindromeBank default_bank(const ExperimentConfig& cfg) {
  Rng rng(derive_seed(cfg.master_seed, kBankStream));
  const DnaSeq source = markov::generate_sequence(cfg.model, cfg.n, rng);
  auto bank = palindrome::build_bank(source, cfg.L);
  bank.source_id = "simulated";
  return bank;
}

Replicate make_replicate(const ExperimentConfig& cfg, const palindrome::PalindromeBank& bank,
                         std::size_t index) {
  Rng rng(derive_seed(cfg.master_seed, index));
  const DnaSeq background = markov::generate_sequence(cfg.model, cfg.n, rng);
  auto inserted = insert_hotspots(background, cfg.layout(), bank, cfg.lambda0_target, rng);

  Replicate r;
  r.events = palindrome::find_palindromes(inserted.sequence, cfg.L);
  r.lambda_average = palindrome::average_rate(r.events, cfg.n, cfg.L).lambda;
  r.lambda_markov = markov::lambda_markov(markov::estimate_model(inserted.sequence), cfg.L).lambda;
  r.sequence = std::move(inserted.sequence);
  r.truth = std::move(inserted.truth);
  return r;
}

RateRow rate_experiment(const ExperimentConfig& cfg,
                        const std::optional<palindrome::PalindromeBank>& bank) {
  cfg.validate();
  const auto source = bank ? *bank : default_bank(cfg);
  std::vector<double> avg(cfg.replicates);
  std::vector<double> mkv(cfg.replicates);
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t i) {
    const Replicate r = make_replicate(cfg, source, i);
    avg[i] = r.lambda_average;
    mkv[i] = r.lambda_markov;
  });

  RateRow row;
  row.multipliers = cfg.multipliers;
  row.replicates = cfg.replicates;
  row.mean_average = mean_of(avg);
  row.mean_markov = mean_of(mkv);
  row.se_average = standard_error(avg);
  row.se_markov = standard_error(mkv);
  row.true_lambda = markov::lambda_markov(cfg.model, cfg.L).lambda;
  row.replicate_average = std::move(avg);
  row.replicate_markov = std::move(mkv);
  return row;
}

std::vector<scan::ScoredPosition> scored_positions(
    const std::vector<palindrome::PalindromeEvent>& events, palindrome::ScoreKind kind, int L,
    const markov::MarkovModel& m) {
  std::vector<scan::ScoredPosition> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back({e.center, palindrome::score_event(e, kind, L, m)});
  return out;
}

bool segment_detected(const scan::WindowSeries& series, const HotspotSpec& spec, double b) {
  if (series.values.empty() || spec.length == 0) return false;
  // Window t covers positions (t, t + w]; it overlaps the segment when
  // t + w >= start and t + 1 <= start + length - 1.
  const std::size_t first = spec.start > series.w ? spec.start - series.w : 0;
  const std::size_t last =
      std::min(series.values.size() - 1, spec.start + spec.length >= 2 ? spec.start + spec.length - 2 : 0);
  for (std::size_t t = first; t <= last; ++t)
    if (series.values[t] >= b) return true;
  return false;
}

std::vector<PowerRow> power_experiment(const ExperimentConfig& cfg, const PowerOptions& opts,
                                       const std::optional<palindrome::PalindromeBank>& bank) {
  cfg.validate();
  if (opts.kind == palindrome::ScoreKind::PCS)
    fail(ErrorCode::InvalidArgument, "power_experiment: score must be PLS or BWS");
  const auto source = bank ? *bank : default_bank(cfg);
  const auto specs = cfg.layout();
  const mgf::ScoreModel sm(opts.kind, cfg.model, cfg.L);
  const std::size_t R = cfg.replicates;

  struct Sample {
    std::vector<scan::ScoredPosition> scores;
    double lambda_average = 0.0;
    double lambda_markov = 0.0;
  };
  std::vector<Sample> samples(R);
  parallel_for(R, cfg.threads, [&](std::size_t i) {
    const Replicate r = make_replicate(cfg, source, i);
    samples[i] = {scored_positions(r.events, opts.kind, cfg.L, cfg.model), r.lambda_average,
                  r.lambda_markov};
  });

  std::vector<double> avg(R);
  std::vector<double> mkv(R);
  for (std::size_t i = 0; i < R; ++i) {
    avg[i] = samples[i].lambda_average;
    mkv[i] = samples[i].lambda_markov;
  }
  const std::array<double, 2> mean_rate{mean_of(avg), mean_of(mkv)};

  auto threshold = [&](double lambda0) {
    return scan::threshold_for_alpha(opts.alpha, cfg.w, cfg.n, lambda0, sm, opts.scan);
  };

  // thresholds[e][i]: estimator e (0 average, 1 Markov), replicate i.
  std::array<std::vector<double>, 2> thresholds;
  for (int e = 0; e < 2; ++e) {
    if (opts.fixed_thresholds) {
      thresholds[e].assign(R, (*opts.fixed_thresholds)[e]);
    } else if (!opts.per_replicate) {
      thresholds[e].assign(R, threshold(mean_rate[e]));
    } else {
      thresholds[e].resize(R);
      const auto& rates = e == 0 ? avg : mkv;
      parallel_for(R, cfg.threads, [&](std::size_t i) { thresholds[e][i] = threshold(rates[i]); });
    }
  }

  std::vector<std::array<std::vector<char>, 2>> hits(R);
  parallel_for(R, cfg.threads, [&](std::size_t i) {
    const auto series = scan::window_scores(samples[i].scores, cfg.w, cfg.n);
    for (int e = 0; e < 2; ++e) {
      hits[i][e].resize(specs.size());
      for (std::size_t s = 0; s < specs.size(); ++s)
        hits[i][e][s] = segment_detected(series, specs[s], thresholds[e][i]) ? 1 : 0;
    }
  });

  std::vector<PowerRow> rows;
  for (int e = 0; e < 2; ++e) {
    PowerRow row;
    row.multipliers = cfg.multipliers;
    row.kind = opts.kind;
    row.estimator = e == 0 ? "average" : "markov";
    row.lambda0 = mean_rate[e];
    row.threshold = mean_of(thresholds[e]);
    row.replicates = R;
    row.power.assign(specs.size(), 0.0);
    row.replicate_threshold = thresholds[e];
    row.detected.reserve(R * specs.size());
    for (std::size_t i = 0; i < R; ++i)
      for (std::size_t s = 0; s < specs.size(); ++s) {
        row.power[s] += hits[i][e][s];
        row.detected.push_back(static_cast<std::uint8_t>(hits[i][e][s]));
      }
    for (double& p : row.power) p /= static_cast<double>(R);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> null_scan_maxima(const ExperimentConfig& cfg, palindrome::ScoreKind kind) {
  cfg.validate();
  std::vector<double> maxima(cfg.replicates);
  parallel_for(cfg.replicates, cfg.threads, [&](std::size_t i) {
    Rng rng(derive_seed(cfg.master_seed, i));
    const DnaSeq seq = markov::generate_sequence(cfg.model, cfg.n, rng);
    const auto events = palindrome::find_palindromes(seq, cfg.L);
    maxima[i] = scan::window_scores(scored_positions(events, kind, cfg.L, cfg.model), cfg.w, cfg.n).max;
  });
  return maxima;
}

std::string rate_table_tsv(const std::vector<RateRow>& rows) {
  std::string out = "a1\ta2\ta3\treplicates\tlambda_average\tlambda_markov\tse_average\tse_markov\ttrue_lambda\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%g\t%g\t%g\t%zu\t%.10g\t%.10g\t%.6g\t%.6g\t%.10g\n",
                  r.multipliers[0], r.multipliers[1], r.multipliers[2], r.replicates,
                  r.mean_average, r.mean_markov, r.se_average, r.se_markov, r.true_lambda);
    out += buf;
  }
  return out;
}

std::string power_table_tsv(const std::vector<PowerRow>& rows) {
  std::string out = "a1\ta2\ta3\tscore\testimator\tlambda0\tthreshold";
  const std::size_t segments = rows.empty() ? 3 : rows.front().power.size();
  for (std::size_t s = 0; s < segments; ++s) out += "\tpower" + std::to_string(s + 1);
  out += '\n';
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%g\t%g\t%g\t%s\t%s\t%.10g\t%.6f", r.multipliers[0],
                  r.multipliers[1], r.multipliers[2], palindrome::to_string(r.kind),
                  r.estimator.c_str(), r.lambda0, r.threshold);
    out += buf;
    for (double p : r.power) {
      std::snprintf(buf, sizeof buf, "\t%.4f", p);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace palinscan::sim
