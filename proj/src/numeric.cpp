#include "palinscan/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "palinscan/error.hpp"

namespace palinscan::numeric {

namespace {

template <typename T>
Matrix4<T> invert(const Matrix4<T>& m) {
  double scale = 0.0;
  for (const auto& e : m.a) scale = std::max(scale, std::abs(e));
  if (scale == 0.0 || !std::isfinite(scale))
    fail(ErrorCode::Singular, "mat_inv: zero or non-finite matrix");

  Matrix4<T> a = m;
  Matrix4<T> inv = Matrix4<T>::identity();
  for (std::size_t col = 0; col < 4; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < 4; ++r)
      if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
    if (std::abs(a(pivot, col)) <= Tolerances::singular_pivot * scale)
      fail(ErrorCode::Singular, "mat_inv: matrix is singular");
    if (pivot != col)
      for (std::size_t c = 0; c < 4; ++c) {
        std::swap(a(pivot, c), a(col, c));
        std::swap(inv(pivot, c), inv(col, c));
      }
    const T p = a(col, col);
    for (std::size_t c = 0; c < 4; ++c) {
      a(col, c) /= p;
      inv(col, c) /= p;
    }
    for (std::size_t r = 0; r < 4; ++r) {
      if (r == col) continue;
      const T f = a(r, col);
      if (f == T(0)) continue;
      for (std::size_t c = 0; c < 4; ++c) {
        a(r, c) -= f * a(col, c);
        inv(r, c) -= f * inv(col, c);
      }
    }
  }
  return inv;
}

double norm2(const Vec4& x) { return std::sqrt(dot(x, x)); }

}  // namespace

Mat4 mat_inv(const Mat4& m) { return invert(m); }
CMat4 mat_inv(const CMat4& m) { return invert(m); }

double max_row_sum(const Mat4& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < 4; ++j) s += std::abs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

double spectral_radius(const Mat4& m) {
  for (const auto& e : m.a)
    if (!(e >= 0.0) || !std::isfinite(e))
      fail(ErrorCode::InvalidArgument,
           "spectral_radius: matrix must be finite and nonnegative");

  const Mat4 shifted = m + Mat4::identity();
  Vec4 x{{0.5, 0.5, 0.5, 0.5}};
  double beta = 0.0;
  for (int it = 0; it < Tolerances::spectral_max_iter; ++it) {
    Vec4 y = shifted * x;
    const double beta_new = norm2(y);
    for (std::size_t i = 0; i < 4; ++i) x[i] = y[i] / beta_new;
    if (it > 0 && std::abs(beta_new - beta) <= Tolerances::spectral_rel * beta_new) {
      // x is now the Perron vector; read the unshifted eigenvalue off it.
      return norm2(m * x);
    }
    beta = beta_new;
  }
  fail(ErrorCode::NoConvergence, "spectral_radius: power iteration did not converge");
}

double find_root(const std::function<double(double)>& f, double lo, double hi,
                 const RootOptions& opts) {
  if (lo > hi) std::swap(lo, hi);
  double flo = f(lo);
  double fhi = f(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi))
    fail(ErrorCode::Domain, "find_root: non-finite value at bracket end");
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0))
    fail(ErrorCode::InvalidArgument, "find_root: no sign change in bracket");

  for (int it = 0; it < opts.max_iter; ++it) {
    const double width = hi - lo;
    double x = 0.5 * (lo + hi);
    // Secant candidate, used only if it lands well inside the bracket.
    const double xs = hi - fhi * (hi - lo) / (fhi - flo);
    if (std::isfinite(xs) && xs > lo + 0.05 * width && xs < hi - 0.05 * width &&
        (it % 4) != 3)
      x = xs;
    const double fx = f(x);
    if (!std::isfinite(fx)) fail(ErrorCode::Domain, "find_root: non-finite value");
    if (std::abs(fx) <= opts.f_tol) return x;
    if ((fx < 0.0) == (flo < 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    if (hi - lo <= opts.x_tol) return std::abs(flo) < std::abs(fhi) ? lo : hi;
  }
  return std::abs(flo) < std::abs(fhi) ? lo : hi;
}

double derivative(const std::function<double(double)>& f, double x, int order) {
  if (order != 1 && order != 2)
    fail(ErrorCode::InvalidArgument, "derivative: order must be 1 or 2");

  auto checked = [&](double at) {
    const double v = f(at);
    if (!std::isfinite(v))
      fail(ErrorCode::Domain, "derivative: non-finite evaluation at " + std::to_string(at));
    return v;
  };

  if (order == 1) {
    const double h = std::max(Tolerances::first_derivative_step,
                              Tolerances::first_derivative_step * std::abs(x));
    auto d = [&](double step) { return (checked(x + step) - checked(x - step)) / (2.0 * step); };
    return (4.0 * d(0.5 * h) - d(h)) / 3.0;
  }
  const double h = std::max(Tolerances::second_derivative_step,
                            Tolerances::second_derivative_step * std::abs(x));
  const double f0 = checked(x);
  auto d2 = [&](double step) {
    return (checked(x + step) - 2.0 * f0 + checked(x - step)) / (step * step);
  };
  return (4.0 * d2(0.5 * h) - d2(h)) / 3.0;
}

}  // namespace palinscan::numeric
