#pragma once

// Moment-generating functions of palindrome scores conditional on an event
// (half-length >= L), under a first-order Markov model or its iid special
// case, together with the cumulant function phi = log K used for
// exponential tilting.

#include <complex>

#include "palinscan/markov.hpp"
#include "palinscan/numeric.hpp"
#include "palinscan/palindrome.hpp"

namespace palinscan::mgf {

using numeric::Mat4;
using numeric::Vec4;
using palindrome::ScoreKind;

/// How the first-factor vector v(t) of the BWS formula is formed.
///  Row:    v_j = (pi_j - sum_i pi_i T_ij)^(1-t), i.e. from pi'(I - T).
///  Column: v_i = ([(I - T) pi]_i)^(1-t), the column-product reading.
enum class VDefinition { Row, Column };

struct ScoreModelOptions {
  bool iid_mode = false;
  VDefinition v_definition = VDefinition::Row;
};

struct TiltDomain {
  double t_max = 0.0;  // +inf for PCS
  ScoreKind kind = ScoreKind::PCS;
};

class ScoreModel {
 public:
  ScoreModel(ScoreKind kind, markov::MarkovModel model, int L, ScoreModelOptions opts = {});

  ScoreKind kind() const noexcept { return kind_; }
  const markov::MarkovModel& model() const noexcept { return model_; }
  int L() const noexcept { return L_; }
  bool iid_mode() const noexcept { return opts_.iid_mode; }
  VDefinition v_definition() const noexcept { return opts_.v_definition; }

  /// T (iid mode: the rank-one P2 pi').
  const Mat4& quasi_T() const noexcept { return t_; }
  /// Centre-closure vector P1 (iid mode: P2).
  const Vec4& closure() const noexcept { return closure_; }
  /// v(0), the exact-length first factor.
  const Vec4& first_factor() const noexcept { return v0_; }
  /// lambda_M, or gamma^L in iid mode.
  double event_rate() const noexcept { return lambda_; }
  double rho_T() const noexcept { return rho_; }
  const TiltDomain& domain() const noexcept { return domain_; }

  /// K(t) = E[exp(t x) | event]. Throws ErrorCode::Domain outside the domain.
  double mgf(double t) const;
  /// K at a complex argument, valid for Re z < t_max.
  std::complex<double> mgf(std::complex<double> z) const;

  /// E[exp(t x); half-length = k] (not normalised by the event rate).
  double exact_length(double t, int k) const;

  /// Tilted BWS building blocks: Q(t)_ij = T_ij^(1-t), u_i = P1_i^(1-t),
  /// v_j = v0_j^(1-t).
  Mat4 tilted_T(double t) const;
  Vec4 tilted_closure(double t) const;
  Vec4 tilted_first_factor(double t) const;

 private:
  template <typename S>
  S evaluate(S t) const;
  void check_domain(double re_t) const;

  ScoreKind kind_;
  markov::MarkovModel model_;
  int L_;
  ScoreModelOptions opts_;
  Mat4 t_;
  Vec4 closure_;
  Vec4 v0_;
  double gamma_ = 0.0;
  double lambda_ = 0.0;
  double rho_ = 0.0;
  TiltDomain domain_;
};

/// PLS: (e^t / lambda) pi' T^(L-1) [I - e^(t/L) T]^-1 (I - T) P1.
double k_pls(const ScoreModel& sm, double t);
/// BWS: v(t)' Q(t)^(L-1) [I - Q(t)]^-1 u(t) / lambda.
double k_bws(const ScoreModel& sm, double t);
double k_exact_length(const ScoreModel& sm, double t, int k);

double phi(const ScoreModel& sm, double theta);
double phi_prime(const ScoreModel& sm, double theta);
double phi_double_prime(const ScoreModel& sm, double theta);

TiltDomain domain_sup_t(const ScoreModel& sm);

/// Characteristic function of y1 = -sum_{N(delta)} x + sum_{N*(delta)} x*,
/// N ~ Poisson(lambda0 delta), x ~ f_theta0, N* ~ Poisson(lambda1 delta),
/// x* ~ f_theta1, evaluated at real t.
std::complex<double> char_y1(double lambda0, double lambda1, double theta0, double theta1,
                             const ScoreModel& sm, double delta, double t);

}  // namespace palinscan::mgf
