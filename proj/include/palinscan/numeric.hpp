#pragma once

// Fixed 4x4 linear algebra over the DNA alphabet, plus the scalar root
// finder and finite-difference derivative used by the analytic formulas.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>

namespace palinscan::numeric {

struct Tolerances {
  static constexpr double singular_pivot = 1e-12;   // relative to max |entry|
  static constexpr double inverse_residual = 1e-10;
  static constexpr double spectral_rel = 1e-10;
  static constexpr int spectral_max_iter = 10000;
  static constexpr double first_derivative_step = 1e-5;
  // Second differences lose ~eps/h^2 to cancellation; a larger step keeps
  // the Richardson estimate near 1e-10 instead of 1e-5.
  static constexpr double second_derivative_step = 1e-3;
};

template <typename T>
struct Vector4 {
  std::array<T, 4> v{};

  T& operator[](std::size_t i) { return v[i]; }
  const T& operator[](std::size_t i) const { return v[i]; }

  friend bool operator==(const Vector4&, const Vector4&) = default;
};

/// Row-major 4x4 matrix.
template <typename T>
struct Matrix4 {
  std::array<T, 16> a{};

  T& operator()(std::size_t r, std::size_t c) { return a[4 * r + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return a[4 * r + c]; }

  static Matrix4 identity() {
    Matrix4 m;
    for (std::size_t i = 0; i < 4; ++i) m(i, i) = T(1);
    return m;
  }
  static Matrix4 diagonal(const Vector4<T>& d) {
    Matrix4 m;
    for (std::size_t i = 0; i < 4; ++i) m(i, i) = d[i];
    return m;
  }

  friend bool operator==(const Matrix4&, const Matrix4&) = default;
};

using Vec4 = Vector4<double>;
using Mat4 = Matrix4<double>;
using CVec4 = Vector4<std::complex<double>>;
using CMat4 = Matrix4<std::complex<double>>;

template <typename T>
Matrix4<T> operator*(const Matrix4<T>& x, const Matrix4<T>& y) {
  Matrix4<T> r;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t k = 0; k < 4; ++k) {
      const T xik = x(i, k);
      for (std::size_t j = 0; j < 4; ++j) r(i, j) += xik * y(k, j);
    }
  return r;
}

template <typename T>
Matrix4<T> operator+(Matrix4<T> x, const Matrix4<T>& y) {
  for (std::size_t i = 0; i < 16; ++i) x.a[i] += y.a[i];
  return x;
}

template <typename T>
Matrix4<T> operator-(Matrix4<T> x, const Matrix4<T>& y) {
  for (std::size_t i = 0; i < 16; ++i) x.a[i] -= y.a[i];
  return x;
}

template <typename T>
Matrix4<T> operator*(T s, Matrix4<T> x) {
  for (auto& e : x.a) e *= s;
  return x;
}

/// m * x (column vector).
template <typename T>
Vector4<T> operator*(const Matrix4<T>& m, const Vector4<T>& x) {
  Vector4<T> r;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) r[i] += m(i, j) * x[j];
  return r;
}

/// xᵀ m (row vector).
template <typename T>
Vector4<T> operator*(const Vector4<T>& x, const Matrix4<T>& m) {
  Vector4<T> r;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) r[j] += x[i] * m(i, j);
  return r;
}

template <typename T>
T dot(const Vector4<T>& x, const Vector4<T>& y) {
  T s{};
  for (std::size_t i = 0; i < 4; ++i) s += x[i] * y[i];
  return s;
}

template <typename T>
Matrix4<T> transpose(const Matrix4<T>& m) {
  Matrix4<T> r;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) r(j, i) = m(i, j);
  return r;
}

/// m^k by repeated squaring; m^0 is the identity.
template <typename T>
Matrix4<T> mat_pow(Matrix4<T> m, unsigned long long k) {
  Matrix4<T> result = Matrix4<T>::identity();
  while (k > 0) {
    if (k & 1ULL) result = result * m;
    k >>= 1ULL;
    if (k > 0) m = m * m;
  }
  return result;
}

/// Gauss-Jordan with partial pivoting. Throws ErrorCode::Singular when a
/// pivot falls below Tolerances::singular_pivot times the largest entry.
Mat4 mat_inv(const Mat4& m);
CMat4 mat_inv(const CMat4& m);

/// Dominant eigenvalue magnitude of a nonnegative matrix by power
/// iteration on m + I (the shift makes the Perron root strictly dominant).
double spectral_radius(const Mat4& m);

double max_row_sum(const Mat4& m);

struct RootOptions {
  double x_tol = 1e-12;
  double f_tol = 1e-12;
  int max_iter = 500;
};

/// Root of f on [lo, hi] given a sign change, by bisection with secant
/// steps whenever the secant point shrinks the bracket enough.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 const RootOptions& opts);

inline double find_root(const std::function<double(double)>& f, double lo,
                        double hi, double tol) {
  return find_root(f, lo, hi, RootOptions{tol, tol, 500});
}

/// Central difference with one Richardson extrapolation step.
/// order must be 1 or 2.
double derivative(const std::function<double(double)>& f, double x, int order);

}  // namespace palinscan::numeric
