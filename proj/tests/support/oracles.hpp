#pragma once

// Independent reference computations shared by the unit tests and the
// acceptance runner. None of them use a matrix inverse.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "palinscan/markov.hpp"
#include "palinscan/mgf.hpp"
#include "palinscan/palindrome.hpp"

namespace palinscan::oracle {

using markov::MarkovModel;
using numeric::Mat4;
using numeric::Vec4;

/// Random rows and an unrelated random pi.
inline MarkovModel random_model(std::mt19937_64& rng) {
  std::gamma_distribution<double> g(1.5, 1.0);
  Vec4 pi;
  Mat4 p;
  for (std::size_t i = 0; i < 4; ++i) {
    pi[i] = g(rng) + 1e-3;
    for (std::size_t j = 0; j < 4; ++j) p(i, j) = g(rng) + 1e-3;
  }
  return MarkovModel::normalized(pi, p);
}

/// Random rows with pi replaced by the stationary distribution, which keeps
/// pi - pi T nonnegative as BWS requires.
inline MarkovModel random_stationary_model(std::mt19937_64& rng) {
  std::gamma_distribution<double> g(2.0, 1.0);
  Vec4 pi;
  Mat4 p;
  for (std::size_t i = 0; i < 4; ++i) {
    pi[i] = g(rng) + 0.05;
    for (std::size_t j = 0; j < 4; ++j) p(i, j) = g(rng) + 0.05;
  }
  auto m = MarkovModel::normalized(pi, p);
  m.pi = markov::stationary_distribution(m);
  return m;
}

/// Probability that a 2L-string starting from pi is a palindrome about its
/// centre, by walking every string of length 2L.
inline double brute_force_rate(const MarkovModel& m, int L) {
  const int n = 2 * L;
  const long long total = 1LL << (2 * n);
  double sum = 0.0;
  std::vector<int> s(n);
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    for (int i = 0; i < n; ++i) {
      s[i] = static_cast<int>(c & 3);
      c >>= 2;
    }
    bool pal = true;
    for (int k = 0; k < L && pal; ++k) pal = s[L - 1 - k] == 3 - s[L + k];
    if (!pal) continue;
    double p = m.pi[s[0]];
    for (int i = 0; i + 1 < n; ++i) p *= m.trans(s[i], s[i + 1]);
    sum += p;
  }
  return sum;
}

/// Same quantity by depth-first search over the left arm only; the right arm
/// is forced to the complement. Used where 4^(2L) is too many strings.
inline double mirrored_rate(const MarkovModel& m, int L) {
  std::vector<int> left(L);
  double total = 0.0;
  auto rec = [&](auto&& self, int depth) -> void {
    if (depth == L) {
      std::vector<int> s(left);
      for (int k = L - 1; k >= 0; --k) s.push_back(3 - left[k]);
      double p = m.pi[s[0]];
      for (std::size_t i = 0; i + 1 < s.size(); ++i) p *= m.trans(s[i], s[i + 1]);
      total += p;
      return;
    }
    for (int a = 0; a < 4; ++a) {
      left[depth] = a;
      self(self, depth + 1);
    }
  };
  rec(rec, 0);
  return total;
}

inline std::string mirror(const std::string& left) {
  std::string right;
  for (auto it = left.rbegin(); it != left.rend(); ++it) right += complement(*it);
  return left + right;
}

inline std::string left_half(int k, long long code) {
  std::string s;
  for (int i = 0; i < k; ++i) {
    s += index_base(static_cast<int>(code & 3));
    code >>= 2;
  }
  return s;
}

/// E[exp(t x); half-length = k] by listing all 4^k patterns.
inline double enumerate_exact_length(mgf::ScoreKind kind, const MarkovModel& m, int L, double t,
                                     int k) {
  double sum = 0.0;
  for (long long code = 0; code < (1LL << (2 * k)); ++code) {
    const double p = palindrome::pattern_probability(mirror(left_half(k, code)), m);
    if (kind == mgf::ScoreKind::BWS)
      sum += p > 0.0 ? std::pow(p, 1.0 - t) : 0.0;
    else
      sum += p * std::exp(t * (kind == mgf::ScoreKind::PCS ? 1.0 : static_cast<double>(k) / L));
  }
  return sum;
}

struct SeriesResult {
  double value = 0.0;
  /// Geometric bound on the neglected tail, relative to value.
  double tail = 0.0;
  int terms = 0;
};

/// K(t) by summing exact-length terms with running matrix products until the
/// terms stop mattering.
inline SeriesResult series_sum(const mgf::ScoreModel& sm, double t) {
  using mgf::ScoreKind;
  const auto& m = sm.model();
  const auto T = markov::build_quasi_T(m);
  const auto P1 = markov::centre_closure(m);
  Vec4 v;
  Mat4 q;
  Vec4 u;
  const Vec4 moved = m.pi * T;
  for (std::size_t i = 0; i < 4; ++i) {
    if (sm.kind() == ScoreKind::BWS) {
      v[i] = std::pow(m.pi[i] - moved[i], 1.0 - t);
      u[i] = std::pow(P1[i], 1.0 - t);
    } else {
      v[i] = m.pi[i];
      u[i] = P1[i];
    }
  }
  for (std::size_t i = 0; i < 16; ++i)
    q.a[i] = sm.kind() == ScoreKind::BWS ? std::pow(T.a[i], 1.0 - t) : T.a[i];
  // PLS/PCS use the (I - T) P1 tail so each term is an exact-length mass.
  Vec4 tail = u;
  if (sm.kind() != ScoreKind::BWS) tail = (Mat4::identity() - T) * P1;

  Vec4 row = v;
  for (int k = 1; k < sm.L(); ++k) row = row * q;
  SeriesResult r;
  double prev = 0.0;
  double term = 0.0;
  for (int k = sm.L(); k < 2000000; ++k) {
    prev = term;
    term = dot(row, tail);
    if (sm.kind() == ScoreKind::PLS) term *= std::exp(t * k / sm.L());
    if (sm.kind() == ScoreKind::PCS) term *= std::exp(t);
    r.value += term;
    ++r.terms;
    if (k > sm.L() + 10 && term < 1e-18 * r.value) break;
    row = row * q;
  }
  const double ratio = prev > 0.0 ? term / prev : 0.0;
  r.tail = ratio < 1.0 ? term * ratio / (1.0 - ratio) / r.value : INFINITY;
  r.value /= sm.event_rate();
  return r;
}

inline double series_oracle(const mgf::ScoreModel& sm, double t) { return series_sum(sm, t).value; }

}  // namespace palinscan::oracle
