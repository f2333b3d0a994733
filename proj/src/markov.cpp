#include "palinscan/markov.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "json.hpp"
#include "palinscan/error.hpp"

namespace palinscan::markov {

namespace {

constexpr double kSumTol = 1e-9;

double round_sig12(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

}  // namespace

const char* to_string(RateMethod m) noexcept {
  switch (m) {
    case RateMethod::Average: return "average";
    case RateMethod::Markov: return "markov";
    case RateMethod::Iid: return "iid";
  }
  return "?";
}

void MarkovModel::validate() const {
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (!(pi[i] >= 0.0) || !std::isfinite(pi[i]))
      fail(ErrorCode::InvalidArgument, "model: pi entries must be finite and >= 0");
    s += pi[i];
  }
  if (std::abs(s - 1.0) > kSumTol) fail(ErrorCode::InvalidArgument, "model: pi must sum to 1");
  for (std::size_t i = 0; i < 4; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      const double p = trans(i, j);
      if (!(p >= 0.0) || !std::isfinite(p))
        fail(ErrorCode::InvalidArgument, "model: transition entries must be finite and >= 0");
      r += p;
    }
    if (std::abs(r - 1.0) > kSumTol)
      fail(ErrorCode::InvalidArgument,
           "model: transition row " + std::string(1, index_base(static_cast<int>(i))) +
               " must sum to 1");
  }
}

MarkovModel MarkovModel::normalized(const Vec4& pi, const Mat4& trans) {
  MarkovModel m;
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) s += pi[i];
  if (!(s > 0.0)) fail(ErrorCode::InvalidArgument, "model: pi has zero mass");
  for (std::size_t i = 0; i < 4; ++i) m.pi[i] = pi[i] / s;
  for (std::size_t i = 0; i < 4; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < 4; ++j) r += trans(i, j);
    if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "model: transition row has zero mass");
    for (std::size_t j = 0; j < 4; ++j) m.trans(i, j) = trans(i, j) / r;
  }
  m.validate();
  return m;
}

MarkovModel bohv1_model() {
  const Vec4 pi{{0.1354, 0.3588, 0.3654, 0.1404}};
  Mat4 p;
  const double rows[4][4] = {{0.1854, 0.3288, 0.3556, 0.1303},
                             {0.1258, 0.2932, 0.4347, 0.1463},
                             {0.1343, 0.4512, 0.2994, 0.1151},
                             {0.1141, 0.3151, 0.3695, 0.2012}};
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) p(i, j) = rows[i][j];
  return MarkovModel::normalized(pi, p);
}

MarkovModel estimate_model(const DnaSeq& s, double pseudo_count) {
  if (s.length() < 2) fail(ErrorCode::InvalidArgument, "estimate_model: sequence shorter than 2");
  if (!(pseudo_count >= 0.0)) fail(ErrorCode::InvalidArgument, "estimate_model: negative pseudo-count");

  std::array<double, 4> letters{};
  std::array<std::array<double, 4>, 4> pairs{};
  const auto& b = s.bases();
  int prev = base_index(b[0]);
  letters[prev] += 1.0;
  for (std::size_t i = 1; i < b.size(); ++i) {
    const int cur = base_index(b[i]);
    letters[cur] += 1.0;
    pairs[prev][cur] += 1.0;
    prev = cur;
  }

  MarkovModel m;
  m.pseudo_count = pseudo_count;
  const double n = static_cast<double>(b.size());
  for (std::size_t i = 0; i < 4; ++i) m.pi[i] = letters[i] / n;
  for (std::size_t i = 0; i < 4; ++i) {
    double row = 4.0 * pseudo_count;
    for (std::size_t j = 0; j < 4; ++j) row += pairs[i][j];
    if (row == 0.0)
      fail(ErrorCode::InvalidArgument,
           std::string("estimate_model: no transitions out of ") + index_base(static_cast<int>(i)) +
               "; use a positive pseudo-count");
    for (std::size_t j = 0; j < 4; ++j) m.trans(i, j) = (pairs[i][j] + pseudo_count) / row;
  }
  return m;
}

Mat4 build_quasi_T(const MarkovModel& m) {
  Mat4 t;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      t(i, j) = m.trans(i, j) * m.trans(complement_index(j), complement_index(i));
  return t;
}

Vec4 centre_closure(const MarkovModel& m) {
  Vec4 p1;
  for (int i = 0; i < 4; ++i) p1[i] = m.trans(i, complement_index(i));
  return p1;
}

double gamma_iid(const Vec4& pi) { return 2.0 * (pi[0] * pi[3] + pi[1] * pi[2]); }

RateEstimate lambda_markov(const MarkovModel& m, int L) {
  if (L < 1) fail(ErrorCode::InvalidArgument, "lambda_markov: L must be >= 1");
  const Mat4 t = build_quasi_T(m);
  const double lambda =
      numeric::dot(m.pi * numeric::mat_pow(t, static_cast<unsigned long long>(L - 1)),
                   centre_closure(m));
  return {lambda, RateMethod::Markov, L};
}

RateEstimate lambda_iid(const Vec4& pi, int L) {
  if (L < 1) fail(ErrorCode::InvalidArgument, "lambda_iid: L must be >= 1");
  return {std::pow(gamma_iid(pi), L), RateMethod::Iid, L};
}

DnaSeq generate_sequence(const MarkovModel& m, std::size_t n, Rng& rng) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "generate_sequence: length must be >= 1");
  std::array<double, 3> first{};
  std::array<std::array<double, 3>, 4> cum{};
  double acc = 0.0;
  for (std::size_t j = 0; j < 3; ++j) first[j] = acc += m.pi[j];
  for (std::size_t i = 0; i < 4; ++i) {
    acc = 0.0;
    for (std::size_t j = 0; j < 3; ++j) cum[i][j] = acc += m.trans(i, j);
  }
  auto draw = [&](const std::array<double, 3>& c) {
    const double u = uniform01(rng);
    return u < c[0] ? 0 : u < c[1] ? 1 : u < c[2] ? 2 : 3;
  };

  std::string out(n, 'A');
  int cur = draw(first);
  out[0] = index_base(cur);
  for (std::size_t i = 1; i < n; ++i) {
    cur = draw(cum[cur]);
    out[i] = index_base(cur);
  }
  return DnaSeq::from_bases(std::move(out), "simulated");
}

Vec4 stationary_distribution(const MarkovModel& m) {
  // Solve x (P - I) = 0 with sum(x) = 1 by replacing one equation.
  Mat4 a = numeric::transpose(m.trans) - Mat4::identity();
  for (std::size_t j = 0; j < 4; ++j) a(3, j) = 1.0;
  const Vec4 rhs{{0.0, 0.0, 0.0, 1.0}};
  return numeric::mat_inv(a) * rhs;
}

double stationarity_gap(const MarkovModel& m) {
  const Vec4 moved = m.pi * m.trans;
  double gap = 0.0;
  for (std::size_t i = 0; i < 4; ++i) gap = std::max(gap, std::abs(moved[i] - m.pi[i]));
  return gap;
}

std::string to_json(const MarkovModel& m) {
  nlohmann::ordered_json j;
  j["pi"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < 4; ++i) j["pi"].push_back(round_sig12(m.pi[i]));
  j["trans"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < 4; ++i) {
    auto row = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < 4; ++k) row.push_back(round_sig12(m.trans(i, k)));
    j["trans"].push_back(row);
  }
  return j.dump();
}

MarkovModel from_json(const std::string& text) {
  MarkovModel m;
  try {
    const auto j = nlohmann::json::parse(text);
    const auto& pi = j.at("pi");
    const auto& tr = j.at("trans");
    if (pi.size() != 4 || tr.size() != 4) fail(ErrorCode::Parse, "model JSON: wrong dimensions");
    for (std::size_t i = 0; i < 4; ++i) {
      m.pi[i] = pi.at(i).get<double>();
      if (tr.at(i).size() != 4) fail(ErrorCode::Parse, "model JSON: wrong dimensions");
      for (std::size_t k = 0; k < 4; ++k) m.trans(i, k) = tr.at(i).at(k).get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::Parse, std::string("model JSON: ") + e.what());
  }
  m.validate();
  return m;
}

}  // namespace palinscan::markov
