#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace mrsla {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : y; }
  constexpr double& operator[](int i) { return i == 0 ? x : y; }

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Real 2x2 matrix. Entries are addressed as (row, col); storage is row-major.
struct Tensor2 {
  std::array<double, 4> a{0.0, 0.0, 0.0, 0.0};

  constexpr Tensor2() = default;
  constexpr Tensor2(double t11, double t12, double t21, double t22) : a{t11, t12, t21, t22} {}

  static constexpr Tensor2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static constexpr Tensor2 zero() { return {}; }
  static constexpr Tensor2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }
  /// Outer product u v^T.
  static constexpr Tensor2 outer(Vec2 u, Vec2 v) { return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y}; }

  constexpr double operator()(int i, int j) const { return a[2 * i + j]; }
  constexpr double& operator()(int i, int j) { return a[2 * i + j]; }

  friend constexpr bool operator==(const Tensor2&, const Tensor2&) = default;

  Tensor2& operator+=(const Tensor2& o) {
    for (int k = 0; k < 4; ++k) a[k] += o.a[k];
    return *this;
  }
  Tensor2& operator-=(const Tensor2& o) {
    for (int k = 0; k < 4; ++k) a[k] -= o.a[k];
    return *this;
  }
};

inline constexpr Tensor2 operator+(Tensor2 x, const Tensor2& y) {
  for (int k = 0; k < 4; ++k) x.a[k] += y.a[k];
  return x;
}
inline constexpr Tensor2 operator-(Tensor2 x, const Tensor2& y) {
  for (int k = 0; k < 4; ++k) x.a[k] -= y.a[k];
  return x;
}
inline constexpr Tensor2 operator-(Tensor2 x) {
  for (auto& v : x.a) v = -v;
  return x;
}
inline constexpr Tensor2 operator*(double s, Tensor2 x) {
  for (auto& v : x.a) v *= s;
  return x;
}
inline constexpr Tensor2 operator*(const Tensor2& x, const Tensor2& y) {
  return {x(0, 0) * y(0, 0) + x(0, 1) * y(1, 0), x(0, 0) * y(0, 1) + x(0, 1) * y(1, 1),
          x(1, 0) * y(0, 0) + x(1, 1) * y(1, 0), x(1, 0) * y(0, 1) + x(1, 1) * y(1, 1)};
}
inline constexpr Vec2 operator*(const Tensor2& x, Vec2 v) {
  return {x(0, 0) * v.x + x(0, 1) * v.y, x(1, 0) * v.x + x(1, 1) * v.y};
}

constexpr Tensor2 transpose(const Tensor2& x) { return {x(0, 0), x(1, 0), x(0, 1), x(1, 1)}; }
constexpr double trace(const Tensor2& x) { return x(0, 0) + x(1, 1); }
constexpr double det(const Tensor2& x) { return x(0, 0) * x(1, 1) - x(0, 1) * x(1, 0); }
/// Double contraction x : y = tr(x y^T).
constexpr double ddot(const Tensor2& x, const Tensor2& y) {
  return x.a[0] * y.a[0] + x.a[1] * y.a[1] + x.a[2] * y.a[2] + x.a[3] * y.a[3];
}
inline double frobenius(const Tensor2& x) { return std::sqrt(ddot(x, x)); }
/// Largest absolute entry.
inline double max_abs(const Tensor2& x) {
  return std::max({std::abs(x.a[0]), std::abs(x.a[1]), std::abs(x.a[2]), std::abs(x.a[3])});
}
constexpr Tensor2 sym(const Tensor2& x) { return 0.5 * (x + transpose(x)); }
constexpr Tensor2 skew(const Tensor2& x) { return 0.5 * (x - transpose(x)); }

inline bool is_finite(const Tensor2& x) {
  return std::all_of(x.a.begin(), x.a.end(), [](double v) { return std::isfinite(v); });
}

/// |x12 - x21| relative to the largest entry.
inline double asymmetry(const Tensor2& x) {
  const double scale = std::max(max_abs(x), 1e-300);
  return std::abs(x(0, 1) - x(1, 0)) / scale;
}

/// Closed-form inverse through the adjugate. Throws SingularTensor when |det| < threshold.
Tensor2 inverse(const Tensor2& x, double singular_threshold = 1e-14);

}  // namespace mrsla
