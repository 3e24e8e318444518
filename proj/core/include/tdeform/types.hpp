#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace tdeform {

/// A point (x, y, z) in three-dimensional phase space. Also used for
/// velocities and gradients, which share the same layout.
struct State {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr State& operator+=(const State& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr State& operator-=(const State& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr State& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }

  friend constexpr bool operator==(const State&, const State&) = default;
};

constexpr State operator+(State a, const State& b) { return a += b; }
constexpr State operator-(State a, const State& b) { return a -= b; }
constexpr State operator-(const State& a) { return {-a.x, -a.y, -a.z}; }
constexpr State operator*(double s, State a) { return a *= s; }
constexpr State operator*(State a, double s) { return a *= s; }

constexpr double dot(const State& a, const State& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

constexpr State cross(const State& a, const State& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const State& a) { return std::sqrt(dot(a, a)); }

inline double max_abs(const State& a) {
  return std::fmax(std::fabs(a.x), std::fmax(std::fabs(a.y), std::fabs(a.z)));
}

inline bool is_finite(const State& s) {
  return std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.z);
}

/// Dense 3x3 matrix, row-major: entry (i, j) is d f_i / d x_j for Jacobians.
struct Matrix3 {
  std::array<double, 9> m{};

  static constexpr Matrix3 identity() { return Matrix3{{1, 0, 0, 0, 1, 0, 0, 0, 1}}; }
  static constexpr Matrix3 from_rows(const State& r0, const State& r1, const State& r2) {
    return Matrix3{{r0.x, r0.y, r0.z, r1.x, r1.y, r1.z, r2.x, r2.y, r2.z}};
  }

  constexpr double operator()(std::size_t r, std::size_t c) const { return m[3 * r + c]; }
  constexpr double& operator()(std::size_t r, std::size_t c) { return m[3 * r + c]; }

  constexpr State row(std::size_t r) const { return {m[3 * r], m[3 * r + 1], m[3 * r + 2]}; }
  constexpr State col(std::size_t c) const { return {m[c], m[3 + c], m[6 + c]}; }

  constexpr double trace() const { return m[0] + m[4] + m[8]; }

  /// Sum of the three principal 2x2 minors (second invariant).
  constexpr double principal_minor_sum() const {
    const auto& a = m;
    return (a[0] * a[4] - a[1] * a[3]) + (a[0] * a[8] - a[2] * a[6]) + (a[4] * a[8] - a[5] * a[7]);
  }

  constexpr double determinant() const {
    const auto& a = m;
    return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
           a[2] * (a[3] * a[7] - a[4] * a[6]);
  }

  constexpr State operator*(const State& v) const { return {dot(row(0), v), dot(row(1), v), dot(row(2), v)}; }

  constexpr Matrix3 operator-(const Matrix3& o) const {
    Matrix3 r;
    for (std::size_t i = 0; i < 9; ++i) r.m[i] = m[i] - o.m[i];
    return r;
  }

  friend constexpr bool operator==(const Matrix3&, const Matrix3&) = default;
};

inline double max_abs(const Matrix3& a) {
  double r = 0.0;
  for (double v : a.m) r = std::fmax(r, std::fabs(v));
  return r;
}

inline bool is_finite(const Matrix3& a) {
  for (double v : a.m)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace tdeform
