#include <cmath>
#include <random>

#include "doctest.h"
#include "palinscan/error.hpp"
#include "palinscan/numeric.hpp"

using namespace palinscan;
using namespace palinscan::numeric;

namespace {

Mat4 random_matrix(std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Mat4 m;
  for (auto& e : m.a) e = u(rng);
  return m;
}

double max_abs_diff(const Mat4& x, const Mat4& y) {
  double d = 0.0;
  for (std::size_t i = 0; i < 16; ++i) d = std::max(d, std::abs(x.a[i] - y.a[i]));
  return d;
}

}  // namespace

TEST_CASE("row and column vector products") {
  Mat4 m;
  for (std::size_t i = 0; i < 16; ++i) m.a[i] = static_cast<double>(i + 1);
  const Vec4 x{{1.0, 0.0, 2.0, -1.0}};
  const Vec4 col = m * x;
  const Vec4 row = x * m;
  // Row 0 of m is 1 2 3 4; column 0 is 1 5 9 13.
  CHECK(col[0] == doctest::Approx(1 + 6 - 4));
  CHECK(row[0] == doctest::Approx(1 + 18 - 13));
  CHECK(dot(x, x) == doctest::Approx(6.0));
  CHECK(transpose(transpose(m)) == m);
}

TEST_CASE("mat_pow agrees with repeated multiplication") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat4 m = 0.5 * random_matrix(rng);
    Mat4 naive = Mat4::identity();
    for (unsigned k = 0; k <= 13; ++k) {
      CHECK(max_abs_diff(mat_pow(m, k), naive) < 1e-12);
      naive = naive * m;
    }
  }
  CHECK(mat_pow(Mat4::identity(), 1000) == Mat4::identity());
}

TEST_CASE("mat_inv residual and singular detection") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat4 m = random_matrix(rng, -1.0, 1.0) + Mat4::identity();
    Mat4 inv;
    try {
      inv = mat_inv(m);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Singular);
      continue;
    }
    CHECK(max_abs_diff(m * inv, Mat4::identity()) < 1e-9);
  }
  Mat4 singular;
  for (std::size_t j = 0; j < 4; ++j) {
    singular(0, j) = 1.0 + j;
    singular(1, j) = 2.0 * (1.0 + j);
    singular(2, j) = j * j;
    singular(3, j) = 1.0;
  }
  CHECK_THROWS_AS(mat_inv(singular), Error);

  CMat4 c = CMat4::identity();
  c(0, 1) = {0.0, 2.0};
  const CMat4 ci = mat_inv(c);
  CHECK(std::abs(ci(0, 1) - std::complex<double>(0.0, -2.0)) < 1e-14);
}

TEST_CASE("spectral radius") {
  SUBCASE("stochastic matrix has radius one") {
    std::mt19937_64 rng(3);
    Mat4 m = random_matrix(rng, 0.05, 1.0);
    for (std::size_t i = 0; i < 4; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < 4; ++j) s += m(i, j);
      for (std::size_t j = 0; j < 4; ++j) m(i, j) /= s;
    }
    CHECK(spectral_radius(m) == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("diagonal and rank one") {
    CHECK(spectral_radius(Mat4::diagonal(Vec4{{0.1, 0.7, 0.3, 0.2}})) ==
          doctest::Approx(0.7).epsilon(1e-9));
    Mat4 r;
    const Vec4 a{{0.1, 0.2, 0.3, 0.4}};
    const Vec4 b{{0.4, 0.3, 0.2, 0.1}};
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) r(i, j) = a[i] * b[j];
    CHECK(spectral_radius(r) == doctest::Approx(dot(a, b)).epsilon(1e-9));
  }
  SUBCASE("negative entries are rejected") {
    Mat4 m = Mat4::identity();
    m(0, 1) = -0.5;
    CHECK_THROWS_AS(spectral_radius(m), Error);
  }
  CHECK(max_row_sum(Mat4::identity()) == 1.0);
}

TEST_CASE("find_root") {
  CHECK(find_root([](double x) { return x * x * x - 2.0; }, 0.0, 2.0, 1e-14) ==
        doctest::Approx(std::cbrt(2.0)).epsilon(1e-13));
  CHECK(find_root([](double x) { return std::cos(x); }, 0.0, 3.0, 1e-14) ==
        doctest::Approx(M_PI / 2).epsilon(1e-13));
  // Flat then steep: bisection fallback must still converge.
  CHECK(find_root([](double x) { return std::exp(40.0 * (x - 0.9)) - 1.0; }, 0.0, 1.0, 1e-13) ==
        doctest::Approx(0.9).epsilon(1e-12));
  CHECK(find_root([](double x) { return x; }, 0.0, 1.0, 1e-12) == 0.0);
  CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12), Error);
}

TEST_CASE("derivative") {
  for (double x : {-1.0, 0.0, 0.5, 3.0}) {
    CHECK(derivative([](double t) { return std::exp(t); }, x, 1) ==
          doctest::Approx(std::exp(x)).epsilon(1e-9));
    CHECK(derivative([](double t) { return std::exp(t); }, x, 2) ==
          doctest::Approx(std::exp(x)).epsilon(1e-8));
    CHECK(derivative([](double t) { return std::sin(t); }, x, 2) ==
          doctest::Approx(-std::sin(x)).epsilon(1e-8).scale(1.0));
  }
  CHECK_THROWS_AS(derivative([](double t) { return t; }, 0.0, 3), Error);
}
