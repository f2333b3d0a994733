#include "palinscan/scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "json.hpp"
#include "palinscan/error.hpp"
#include "palinscan/random.hpp"
#include "palinscan/sampler.hpp"

namespace palinscan::scan {

WindowSeries window_scores(std::vector<ScoredPosition> events, std::size_t w, std::size_t W) {
  if (w < 1 || w > W) fail(ErrorCode::InvalidArgument, "window_scores: need 1 <= w <= W");
  for (const auto& e : events)
    if (e.position >= W)
      fail(ErrorCode::InvalidArgument,
           "window_scores: event position " + std::to_string(e.position) + " outside [0, W)");
  std::stable_sort(events.begin(), events.end(),
                   [](const ScoredPosition& a, const ScoredPosition& b) { return a.position < b.position; });

  WindowSeries s;
  s.w = w;
  s.W = W;
  const std::size_t n = W - w + 1;
  s.values.resize(n);
  s.counts.resize(n);

  std::size_t enter = 0;  // next event to enter the window
  std::size_t leave = 0;  // next event to leave it
  double sum = 0.0;
  std::uint32_t count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    while (enter < events.size() && events[enter].position <= t + w) {
      sum += events[enter++].score;
      ++count;
    }
    while (leave < enter && events[leave].position <= t) {
      sum -= events[leave++].score;
      --count;
    }
    if (count == 0) sum = 0.0;  // drop accumulated rounding
    s.values[t] = sum;
    s.counts[t] = count;
  }
  const auto it = std::max_element(s.values.begin(), s.values.end());
  s.argmax = static_cast<std::size_t>(it - s.values.begin());
  s.max = *it;
  return s;
}

LlrStatistics llr_statistics(const WindowSeries& series, const TiltSolution& ts) {
  if (series.w != ts.w) fail(ErrorCode::InvalidArgument, "llr_statistics: window width mismatch");
  if (series.values.empty()) fail(ErrorCode::InvalidArgument, "llr_statistics: empty series");
  const double w = static_cast<double>(series.w);
  const double drift = (ts.lambda1 - ts.lambda0) * w;
  const double log_ratio = std::log(ts.lambda1 / ts.lambda0);
  const double dtheta = ts.theta1 - ts.theta0;

  LlrStatistics out;
  out.pcs_llr = -std::numeric_limits<double>::infinity();
  out.weighted_llr = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < series.values.size(); ++t) {
    const double pcs = series.counts[t] * log_ratio - drift;
    const double weighted = -drift + dtheta * series.values[t];
    if (pcs > out.pcs_llr) {
      out.pcs_llr = pcs;
      out.pcs_argmax = t;
    }
    if (weighted > out.weighted_llr) {
      out.weighted_llr = weighted;
      out.weighted_argmax = t;
    }
    out.max_count = std::max(out.max_count, series.counts[t]);
  }
  out.max_score = series.max;
  return out;
}

double null_window_mean(double lambda0, const mgf::ScoreModel& sm, std::size_t w) {
  return static_cast<double>(w) * lambda0 * mgf::phi_prime(sm, 0.0);
}

namespace {

// Keep theta far enough below t_max that the second-difference stencil of
// phi'' stays inside the domain.
double tilt_upper_bound(const mgf::ScoreModel& sm) {
  const double t_max = sm.domain().t_max;
  if (!std::isfinite(t_max)) return t_max;
  return t_max - 2.5 * numeric::Tolerances::second_derivative_step * std::max(1.0, t_max);
}

}  // namespace

TiltSolution solve_tilt(double lambda0, const mgf::ScoreModel& sm, double b, std::size_t w,
                        TiltConvention convention) {
  if (!(lambda0 > 0.0)) fail(ErrorCode::InvalidArgument, "solve_tilt: lambda0 must be positive");
  if (w == 0) fail(ErrorCode::InvalidArgument, "solve_tilt: window must be positive");
  const double scale = convention == TiltConvention::PerBasePair ? static_cast<double>(w) : 1.0;

  TiltSolution ts;
  ts.lambda0 = lambda0;
  ts.b = b;
  ts.w = w;
  ts.convention = convention;

  const double mean0 = scale * lambda0 * mgf::phi_prime(sm, 0.0);
  if (b < mean0 * (1.0 - 1e-12))
    fail(ErrorCode::InvalidArgument, "solve_tilt: threshold is below the null window mean");
  if (b <= mean0 * (1.0 + 1e-12)) {
    ts.lambda1 = lambda0;
    return ts;
  }

  auto g = [&](double theta) {
    return scale * lambda0 * std::exp(mgf::phi(sm, theta)) * mgf::phi_prime(sm, theta) - b;
  };

  double hi = tilt_upper_bound(sm);
  if (std::isfinite(hi)) {
    if (!(hi > 0.0) || g(hi) < 0.0)
      fail(ErrorCode::Unattainable, "solve_tilt: threshold unreachable within the MGF domain");
  } else {
    hi = 1.0;
    for (int i = 0; g(hi) < 0.0; ++i) {
      if (i > 60) fail(ErrorCode::Unattainable, "solve_tilt: no bracket for the tilt");
      hi *= 2.0;
    }
  }
  ts.theta1 = numeric::find_root(g, 0.0, hi, numeric::RootOptions{1e-15, 1e-11 * b, 500});
  ts.lambda1 = lambda0 * std::exp(mgf::phi(sm, ts.theta1) - mgf::phi(sm, ts.theta0));
  return ts;
}

OvershootEstimate overshoot_nu(const TiltSolution& ts, const mgf::ScoreModel& sm, double delta,
                               std::size_t n_walks, std::uint64_t seed) {
  const double dtheta = ts.theta1 - ts.theta0;
  if (!(dtheta > 0.0)) fail(ErrorCode::InvalidArgument, "overshoot_nu: need theta1 > theta0");
  if (!(delta > 0.0)) fail(ErrorCode::InvalidArgument, "overshoot_nu: delta must be positive");
  if (n_walks < 2) fail(ErrorCode::InvalidArgument, "overshoot_nu: need at least 2 walks");

  const sim::TiltedScoreSampler null_scores(sm, ts.theta0);
  const sim::TiltedScoreSampler alt_scores(sm, ts.theta1);
  const double r0 = ts.lambda0 * delta;
  const double r1 = ts.lambda1 * delta;
  const double r = r0 + r1;
  const double p_down = r0 / r;
  const double p_nonzero = -std::expm1(-r);
  constexpr std::size_t kStepCap = 1000000;

  // Only increments with at least one event move the walk, so they are drawn
  // directly: the event count is zero-truncated Poisson(r) and each event is
  // a null (-x) or tilted (+x*) event with probability r0/r, r1/r.
  std::vector<double> heights;
  heights.reserve(n_walks);
  std::size_t capped = 0;
  for (std::size_t walk = 0; walk < n_walks; ++walk) {
    Rng rng(derive_seed(seed, walk));
    double s = 0.0;
    std::size_t steps = 0;
    while (s <= 0.0 && steps < kStepCap) {
      const double target = uniform01(rng) * p_nonzero;
      double pm = std::exp(-r) * r;
      double acc = pm;
      int m = 1;
      while (acc < target && m < 10000) {
        ++m;
        pm *= r / m;
        acc += pm;
      }
      for (int e = 0; e < m; ++e)
        s += uniform01(rng) < p_down ? -null_scores.sample(rng) : alt_scores.sample(rng);
      ++steps;
    }
    if (s > 0.0)
      heights.push_back(s);
    else
      ++capped;
  }
  if (static_cast<double>(capped) > 0.001 * static_cast<double>(n_walks))
    fail(ErrorCode::NoConvergence, "overshoot_nu: ladder step cap exceeded in " +
                                       std::to_string(capped) + " walks");

  const double n = static_cast<double>(heights.size());
  double mean_e = 0.0;
  double mean_s = 0.0;
  for (double h : heights) {
    mean_e += std::exp(-dtheta * h);
    mean_s += h;
  }
  mean_e /= n;
  mean_s /= n;
  double var_e = 0.0;
  double var_s = 0.0;
  double cov = 0.0;
  for (double h : heights) {
    const double de = std::exp(-dtheta * h) - mean_e;
    const double ds = h - mean_s;
    var_e += de * de;
    var_s += ds * ds;
    cov += de * ds;
  }
  var_e /= (n - 1.0);
  var_s /= (n - 1.0);
  cov /= (n - 1.0);

  const double denom = -std::expm1(-dtheta);
  OvershootEstimate out;
  out.walks = heights.size();
  out.capped = capped;
  out.nu = (1.0 - mean_e) / (denom * mean_s);
  // Delta method on nu = (1 - A) / (c B).
  const double d_a = -1.0 / (denom * mean_s);
  const double d_b = -out.nu / mean_s;
  const double var = d_a * d_a * var_e + d_b * d_b * var_s + 2.0 * d_a * d_b * cov;
  out.se = std::sqrt(std::max(0.0, var) / n);
  return out;
}

PvalueReport p_value(double b, std::size_t w, std::size_t W, double lambda0,
                     const mgf::ScoreModel& sm, const ScanOptions& opts) {
  if (W <= w) fail(ErrorCode::InvalidArgument, "p_value: need W > w");
  const TiltSolution ts = solve_tilt(lambda0, sm, b, w, opts.tilt);

  PvalueReport r;
  r.b = b;
  r.w = w;
  r.W = W;
  r.lambda0 = lambda0;
  r.lambda1 = ts.lambda1;
  r.theta1 = ts.theta1;
  if (!(ts.theta1 > 0.0)) {
    // At the null mean the approximation degenerates; nothing is rare.
    r.p = 1.0;
    r.exponent = std::numeric_limits<double>::infinity();
    return r;
  }

  if (opts.nu_fixed) {
    r.nu = *opts.nu_fixed;
    r.nu_se = 0.0;
  } else {
    const OvershootEstimate nu = overshoot_nu(ts, sm, opts.delta, opts.nu_walks, opts.nu_seed);
    r.nu = nu.nu;
    r.nu_se = nu.se;
  }

  const double wd = static_cast<double>(w);
  const double mu0 = mgf::phi_prime(sm, ts.theta0);
  const double i_b_w = b * (ts.theta1 - ts.theta0) - wd * (ts.lambda1 - ts.lambda0);
  r.i_b = i_b_w / wd;
  const double phi1 = mgf::phi_prime(sm, ts.theta1);
  r.mean_factor = opts.literal_mean_factor
                      ? b - lambda0 * mu0
                      : opts.delta * (ts.lambda1 * phi1 - lambda0 * mu0);
  const double second =
      mgf::phi_double_prime(sm, ts.theta1) + (opts.literal_variance ? 0.0 : phi1 * phi1);
  const double variance = wd * ts.lambda1 * second;
  if (!(variance > 0.0))
    fail(ErrorCode::Domain, opts.literal_variance
                                ? "p_value: w lambda1 phi''(theta1) vanishes for this score"
                                : "p_value: non-positive local variance");
  const double local = 1.0 / std::sqrt(2.0 * std::numbers::pi * variance);
  r.exponent = static_cast<double>(W - w) * r.nu * r.mean_factor * std::exp(-i_b_w) * local;
  r.p = std::clamp(-std::expm1(-r.exponent), 0.0, 1.0);
  return r;
}

double threshold_for_alpha(double alpha, std::size_t w, std::size_t W, double lambda0,
                           const mgf::ScoreModel& sm, const ScanOptions& opts) {
  if (!(alpha > 0.0 && alpha < 1.0))
    fail(ErrorCode::InvalidArgument, "threshold_for_alpha: alpha must lie in (0, 1)");
  const double mean = null_window_mean(lambda0, sm, w);
  const double scale = opts.tilt == TiltConvention::PerBasePair ? static_cast<double>(w) : 1.0;
  auto b_of_theta = [&](double theta) {
    return scale * lambda0 * std::exp(mgf::phi(sm, theta)) * mgf::phi_prime(sm, theta);
  };

  // First pass with a fixed nu (1 unless the caller fixed it): cheap, and
  // since p grows with nu it bounds the Monte Carlo threshold from above.
  ScanOptions fixed = opts;
  fixed.nu_fixed = opts.nu_fixed.value_or(1.0);
  auto p_fixed = [&](double b) { return p_value(b, w, W, lambda0, sm, fixed).p; };

  double b_hi = 0.0;
  const double theta_hi = tilt_upper_bound(sm);
  if (std::isfinite(theta_hi)) {
    b_hi = b_of_theta(theta_hi) * (1.0 - 1e-9);
    if (p_fixed(b_hi) > alpha)
      fail(ErrorCode::Unattainable, "threshold_for_alpha: alpha unattainable within the MGF domain");
  } else {
    b_hi = 2.0 * std::max(mean, 1.0);
    for (int i = 0; p_fixed(b_hi) > alpha; ++i) {
      if (i > 60) fail(ErrorCode::Unattainable, "threshold_for_alpha: no upper bracket");
      b_hi *= 2.0;
    }
  }
  // Walk down towards the null mean until p exceeds alpha; this keeps the
  // bracket on the decreasing branch of the approximation.
  double b_lo = b_hi;
  for (int i = 0;; ++i) {
    if (i > 80) fail(ErrorCode::Unattainable, "threshold_for_alpha: no lower bracket");
    const double b = mean + (b_hi - mean) * 0.5;
    if (p_fixed(b) > alpha) {
      b_lo = b;
      break;
    }
    b_hi = b;
  }
  const numeric::RootOptions root{1e-10 * b_hi, 1e-7 * alpha, 200};
  const double b_fixed =
      numeric::find_root([&](double b) { return p_fixed(b) - alpha; }, b_lo, b_hi, root);
  if (opts.nu_fixed) return b_fixed;

  // Refine with the Monte Carlo nu (same seed at every iterate). The
  // estimate may exceed 1 slightly, so the upper end is checked too.
  auto p_at = [&](double b) { return p_value(b, w, W, lambda0, sm, opts).p; };
  const double span = b_fixed - mean;
  double hi = b_fixed;
  for (int k = 6; p_at(hi) > alpha; --k) {
    if (k < -20) fail(ErrorCode::Unattainable, "threshold_for_alpha: no upper bracket");
    hi = b_fixed + span * std::ldexp(1.0, -k);
  }
  double lo = hi;
  for (int k = 6;; --k) {
    if (k < 0) {
      lo = b_lo;
      break;
    }
    const double b = b_fixed - span * std::ldexp(1.0, -k);
    if (p_at(b) > alpha) {
      lo = b;
      break;
    }
    hi = std::min(hi, b);
  }
  return numeric::find_root([&](double b) { return p_at(b) - alpha; }, lo, hi,
                            numeric::RootOptions{1e-9 * hi, 2e-4 * alpha, 200});
}

ScanReport scan_events(const std::vector<ScoredPosition>& events, std::size_t W, double lambda0,
                       const mgf::ScoreModel& sm, std::size_t w, const ScanOptions& opts) {
  ScanReport rep;
  rep.series = window_scores(events, w, W);
  rep.lambda0 = lambda0;
  rep.kind = sm.kind();
  rep.events = events.size();
  const double mean = null_window_mean(lambda0, sm, w);
  if (rep.series.max <= mean * (1.0 + 1e-12)) {
    rep.at_or_below_null = true;
    rep.pvalue.b = rep.series.max;
    rep.pvalue.w = w;
    rep.pvalue.W = W;
    rep.pvalue.lambda0 = lambda0;
    rep.pvalue.lambda1 = lambda0;
    rep.pvalue.p = 1.0;
    return rep;
  }
  rep.pvalue = p_value(rep.series.max, w, W, lambda0, sm, opts);
  return rep;
}

std::string to_json(const ScanReport& r) {
  nlohmann::ordered_json j;
  j["w"] = r.series.w;
  j["W"] = r.series.W;
  j["lambda0"] = r.lambda0;
  j["kind"] = palindrome::to_string(r.kind);
  j["b"] = r.pvalue.b;
  j["theta1"] = r.pvalue.theta1;
  j["lambda1"] = r.pvalue.lambda1;
  j["nu"] = r.pvalue.nu;
  j["nu_se"] = r.pvalue.nu_se;
  j["p"] = r.pvalue.p;
  j["argmax"] = r.series.argmax;
  j["max"] = r.series.max;
  return j.dump();
}

std::string series_to_tsv(const WindowSeries& s) {
  std::string out = "t\tcount\tscore\n";
  char buf[80];
  for (std::size_t t = 0; t < s.values.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%zu\t%u\t%.12g\n", t, s.counts[t], s.values[t]);
    out += buf;
  }
  return out;
}

}  // namespace palinscan::scan
