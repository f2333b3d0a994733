#pragma once

#include <cstddef>
#include <string>

#include "palinscan/numeric.hpp"
#include "palinscan/random.hpp"
#include "palinscan/seqio.hpp"

namespace palinscan::markov {

using numeric::Mat4;
using numeric::Vec4;

/// First-order Markov model over A, C, G, T (in that order).
/// pi holds letter frequencies, trans the row-stochastic transition matrix.
struct MarkovModel {
  Vec4 pi;
  Mat4 trans;
  double pseudo_count = 0.0;

  /// Throws InvalidArgument if the distribution invariants fail.
  void validate() const;

  /// Builds a model from rounded or unnormalised values: pi and every row of
  /// trans are rescaled to sum to one, then validated.
  static MarkovModel normalized(const Vec4& pi, const Mat4& trans);
};

/// The bovine herpesvirus 1 model (sequence BHV1CGEN, 135301 bp), rows
/// renormalised from their 4-decimal values.
MarkovModel bohv1_model();
inline constexpr std::size_t kBohv1Length = 135301;

enum class RateMethod { Average, Markov, Iid };

struct RateEstimate {
  double lambda = 0.0;
  RateMethod method = RateMethod::Average;
  int L = 0;
};

const char* to_string(RateMethod m) noexcept;

MarkovModel estimate_model(const DnaSeq& s, double pseudo_count = 0.0);

/// T[i][j] = P[i][j] * P[comp j][comp i]: a step and its mirror-image step
/// on the opposite arm of a palindrome.
Mat4 build_quasi_T(const MarkovModel& m);

/// P1[i] = P[i][comp i], the probability of closing the palindrome centre.
Vec4 centre_closure(const MarkovModel& m);

/// gamma = 2 (pi_A pi_T + pi_C pi_G).
double gamma_iid(const Vec4& pi);

/// P(half-length >= L) at a given centre: pi' T^(L-1) P1.
RateEstimate lambda_markov(const MarkovModel& m, int L);

/// iid special case gamma^L.
RateEstimate lambda_iid(const Vec4& pi, int L);

DnaSeq generate_sequence(const MarkovModel& m, std::size_t n, Rng& rng);

/// Left Perron vector of trans, normalised to sum one. Diagnostic only.
Vec4 stationary_distribution(const MarkovModel& m);

/// || pi P - pi ||_inf, how far pi is from stationarity under P.
double stationarity_gap(const MarkovModel& m);

/// {"pi":[4],"trans":[[4]x4]} with 12 significant digits.
std::string to_json(const MarkovModel& m);
MarkovModel from_json(const std::string& text);

}  // namespace palinscan::markov
