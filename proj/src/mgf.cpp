#include "palinscan/mgf.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "palinscan/error.hpp"

namespace palinscan::mgf {

namespace {

using Complex = std::complex<double>;

double real_part(double x) { return x; }
double real_part(Complex z) { return z.real(); }

/// base^e for a nonnegative real base; 0^e is 0 while Re e > 0.
template <typename S>
S rpow(double base, S e) {
  if (base < 0.0) fail(ErrorCode::Domain, "negative base in tilted power");
  if (base == 0.0) {
    if (real_part(e) <= 0.0)
      fail(ErrorCode::Domain, "zero probability raised to a non-positive power (t >= 1)");
    return S(0.0);
  }
  return std::exp(e * std::log(base));
}

template <typename S>
numeric::Matrix4<S> lift(const Mat4& m) {
  numeric::Matrix4<S> r;
  for (std::size_t i = 0; i < 16; ++i) r.a[i] = S(m.a[i]);
  return r;
}

template <typename S>
numeric::Vector4<S> lift(const Vec4& v) {
  numeric::Vector4<S> r;
  for (std::size_t i = 0; i < 4; ++i) r[i] = S(v[i]);
  return r;
}

Mat4 outer(const Vec4& col, const Vec4& row) {
  Mat4 m;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) m(i, j) = col[i] * row[j];
  return m;
}

Vec4 complement_pi(const Vec4& pi) { return Vec4{{pi[3], pi[2], pi[1], pi[0]}}; }

}  // namespace

ScoreModel::ScoreModel(ScoreKind kind, markov::MarkovModel model, int L, ScoreModelOptions opts)
    : kind_(kind), model_(std::move(model)), L_(L), opts_(opts) {
  if (L_ < 1) fail(ErrorCode::InvalidArgument, "score model: L must be >= 1");
  model_.validate();

  gamma_ = markov::gamma_iid(model_.pi);
  if (opts_.iid_mode) {
    // iid: T collapses to P2 pi' and P1 to P2.
    closure_ = complement_pi(model_.pi);
    t_ = outer(closure_, model_.pi);
    lambda_ = std::pow(gamma_, L_);
  } else {
    t_ = markov::build_quasi_T(model_);
    closure_ = markov::centre_closure(model_);
    lambda_ = markov::lambda_markov(model_, L_).lambda;
  }
  if (!(lambda_ > 0.0)) fail(ErrorCode::Domain, "score model: event probability is zero");

  rho_ = numeric::spectral_radius(t_);
  if (!(rho_ < 1.0))
    fail(ErrorCode::Domain, "score model: spectral radius of T is not below 1");

  if (opts_.v_definition == VDefinition::Row) {
    const Vec4 moved = model_.pi * t_;
    for (std::size_t j = 0; j < 4; ++j) v0_[j] = model_.pi[j] - moved[j];
  } else {
    const Vec4 moved = t_ * model_.pi;
    for (std::size_t i = 0; i < 4; ++i) v0_[i] = model_.pi[i] - moved[i];
  }
  if (kind_ == ScoreKind::BWS)
    for (std::size_t i = 0; i < 4; ++i)
      if (v0_[i] < 0.0)
        fail(ErrorCode::Domain, "score model: BWS first-factor vector has a negative entry");

  domain_ = domain_sup_t(*this);
}

void ScoreModel::check_domain(double re_t) const {
  if (!(re_t < domain_.t_max))
    fail(ErrorCode::Domain, "MGF argument " + std::to_string(re_t) +
                                " outside domain (t_max = " + std::to_string(domain_.t_max) + ")");
}

template <typename S>
S ScoreModel::evaluate(S t) const {
  using M = numeric::Matrix4<S>;
  using V = numeric::Vector4<S>;
  const double L = static_cast<double>(L_);
  switch (kind_) {
    case ScoreKind::PCS:
      return std::exp(t);

    case ScoreKind::PLS: {
      if (opts_.iid_mode)
        return std::exp(t) * (1.0 - gamma_) / (1.0 - std::exp(t / L) * gamma_);
      const Vec4 row = model_.pi * numeric::mat_pow(t_, static_cast<unsigned long long>(L_ - 1));
      const Vec4 tail = (Mat4::identity() - t_) * closure_;
      const M a = M::identity() - std::exp(t / L) * lift<S>(t_);
      const V solved = numeric::mat_inv(a) * lift<S>(tail);
      return std::exp(t) / lambda_ * numeric::dot(lift<S>(row), solved);
    }

    case ScoreKind::BWS: {
      const S e = S(1.0) - t;
      if (opts_.iid_mode) {
        const Vec4& p = model_.pi;
        const S gt = 2.0 * (rpow(p[0] * p[3], e) + rpow(p[1] * p[2], e));
        return rpow(1.0 - gamma_, e) / (S(1.0) - gt) * std::pow(gt / gamma_, L_);
      }
      M q;
      V u;
      V v;
      for (std::size_t i = 0; i < 16; ++i) q.a[i] = rpow(t_.a[i], e);
      for (std::size_t i = 0; i < 4; ++i) {
        u[i] = rpow(closure_[i], e);
        v[i] = rpow(v0_[i], e);
      }
      const V right = numeric::mat_pow(q, static_cast<unsigned long long>(L_ - 1)) *
                      (numeric::mat_inv(M::identity() - q) * u);
      return numeric::dot(v, right) / lambda_;
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown score kind");
}

double ScoreModel::mgf(double t) const {
  check_domain(t);
  return evaluate(t);
}

std::complex<double> ScoreModel::mgf(std::complex<double> z) const {
  check_domain(z.real());
  return evaluate(z);
}

double ScoreModel::exact_length(double t, int k) const {
  if (k < 1) fail(ErrorCode::InvalidArgument, "exact_length: k must be >= 1");
  const auto kk = static_cast<unsigned long long>(k);
  if (kind_ == ScoreKind::BWS) {
    if (opts_.iid_mode) {
      const Vec4& p = model_.pi;
      const double gt = 2.0 * (rpow(p[0] * p[3], 1.0 - t) + rpow(p[1] * p[2], 1.0 - t));
      return rpow(1.0 - gamma_, 1.0 - t) * std::pow(gt, k);
    }
    return numeric::dot(tilted_first_factor(t) * numeric::mat_pow(tilted_T(t), kk - 1),
                        tilted_closure(t));
  }
  // P(half-length = k) = pi' T^(k-1) (I - T) P1.
  double pk = 0.0;
  if (opts_.iid_mode) {
    pk = std::pow(gamma_, k) * (1.0 - gamma_);
  } else {
    const Vec4 tail = (Mat4::identity() - t_) * closure_;
    pk = numeric::dot(model_.pi * numeric::mat_pow(t_, kk - 1), tail);
  }
  const double score = kind_ == ScoreKind::PCS ? 1.0 : static_cast<double>(k) / L_;
  return std::exp(t * score) * pk;
}

Mat4 ScoreModel::tilted_T(double t) const {
  Mat4 q;
  for (std::size_t i = 0; i < 16; ++i) q.a[i] = rpow(t_.a[i], 1.0 - t);
  return q;
}

Vec4 ScoreModel::tilted_closure(double t) const {
  Vec4 u;
  for (std::size_t i = 0; i < 4; ++i) u[i] = rpow(closure_[i], 1.0 - t);
  return u;
}

Vec4 ScoreModel::tilted_first_factor(double t) const {
  Vec4 v;
  for (std::size_t i = 0; i < 4; ++i) v[i] = rpow(v0_[i], 1.0 - t);
  return v;
}

double k_pls(const ScoreModel& sm, double t) {
  if (sm.kind() != ScoreKind::PLS) fail(ErrorCode::InvalidArgument, "k_pls: score model is not PLS");
  return sm.mgf(t);
}

double k_bws(const ScoreModel& sm, double t) {
  if (sm.kind() != ScoreKind::BWS) fail(ErrorCode::InvalidArgument, "k_bws: score model is not BWS");
  return sm.mgf(t);
}

double k_exact_length(const ScoreModel& sm, double t, int k) { return sm.exact_length(t, k); }

double phi(const ScoreModel& sm, double theta) {
  if (sm.kind() == ScoreKind::PCS) return theta;
  return std::log(sm.mgf(theta));
}

double phi_prime(const ScoreModel& sm, double theta) {
  if (sm.kind() == ScoreKind::PCS) return 1.0;
  return numeric::derivative([&](double x) { return phi(sm, x); }, theta, 1);
}

double phi_double_prime(const ScoreModel& sm, double theta) {
  if (sm.kind() == ScoreKind::PCS) return 0.0;
  return numeric::derivative([&](double x) { return phi(sm, x); }, theta, 2);
}

TiltDomain domain_sup_t(const ScoreModel& sm) {
  const double inf = std::numeric_limits<double>::infinity();
  switch (sm.kind()) {
    case ScoreKind::PCS:
      return {inf, ScoreKind::PCS};
    case ScoreKind::PLS:
      return {sm.rho_T() > 0.0 ? -sm.L() * std::log(sm.rho_T()) : inf, ScoreKind::PLS};
    case ScoreKind::BWS: {
      // rho(Q(t)) is log-convex in t, below 1 at t = 0; find where it hits 1.
      const Vec4& p = sm.model().pi;
      auto excess = [&](double t) {
        if (sm.iid_mode())
          return 2.0 * (rpow(p[0] * p[3], 1.0 - t) + rpow(p[1] * p[2], 1.0 - t)) - 1.0;
        return numeric::spectral_radius(sm.tilted_T(t)) - 1.0;
      };
      const double hi = 1.0 - 1e-12;
      if (excess(hi) < 0.0) return {1.0, ScoreKind::BWS};
      return {numeric::find_root(excess, 0.0, hi, numeric::RootOptions{1e-13, 0.0, 500}),
              ScoreKind::BWS};
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown score kind");
}

std::complex<double> char_y1(double lambda0, double lambda1, double theta0, double theta1,
                             const ScoreModel& sm, double delta, double t) {
  if (!(lambda0 > 0.0) || !(lambda1 > 0.0) || !(delta > 0.0))
    fail(ErrorCode::InvalidArgument, "char_y1: rates and delta must be positive");
  const double k0 = sm.mgf(theta0);
  const double k1 = sm.mgf(theta1);
  // E exp(-i t x), x ~ f_theta0, and E exp(i t x*), x* ~ f_theta1, as ratios
  // of the untilted MGF at shifted complex arguments.
  const Complex down = sm.mgf(Complex(theta0, -t)) / k0;
  const Complex up = sm.mgf(Complex(theta1, t)) / k1;
  return std::exp(lambda0 * delta * (down - 1.0)) * std::exp(lambda1 * delta * (up - 1.0));
}

}  // namespace palinscan::mgf
