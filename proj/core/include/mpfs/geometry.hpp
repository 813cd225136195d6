#pragma once

#include <array>
#include <cmath>

namespace mpfs {

/// Point or vector in the plane.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr double& operator[](int i) { return i == 0 ? x : y; }
  constexpr double operator[](int i) const { return i == 0 ? x : y; }

  constexpr Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s) {
    x *= s;
    y *= s;
    return *this;
  }
};

constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

/// 2x2 matrix stored row-major; for a vector field, (i, j) is d u_i / d x_j.
struct Mat2 {
  std::array<double, 4> a{};

  constexpr double& operator()(int i, int j) { return a[2 * i + j]; }
  constexpr double operator()(int i, int j) const { return a[2 * i + j]; }

  constexpr double det() const { return a[0] * a[3] - a[1] * a[2]; }
  constexpr double trace() const { return a[0] + a[3]; }
  constexpr Mat2 transpose() const { return Mat2{{a[0], a[2], a[1], a[3]}}; }
  constexpr Mat2 inverse() const {
    const double d = det();
    return Mat2{{a[3] / d, -a[1] / d, -a[2] / d, a[0] / d}};
  }
  constexpr Vec2 row(int i) const { return {a[2 * i], a[2 * i + 1]}; }
};

constexpr Vec2 operator*(const Mat2& m, const Vec2& v) {
  return {m(0, 0) * v.x + m(0, 1) * v.y, m(1, 0) * v.x + m(1, 1) * v.y};
}
constexpr Mat2 operator*(const Mat2& l, const Mat2& r) {
  Mat2 out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out(i, j) = l(i, 0) * r(0, j) + l(i, 1) * r(1, j);
  return out;
}
constexpr Mat2 operator+(const Mat2& l, const Mat2& r) {
  Mat2 out;
  for (int i = 0; i < 4; ++i) out.a[i] = l.a[i] + r.a[i];
  return out;
}
constexpr Mat2 operator-(const Mat2& l, const Mat2& r) {
  Mat2 out;
  for (int i = 0; i < 4; ++i) out.a[i] = l.a[i] - r.a[i];
  return out;
}
constexpr Mat2 operator*(double s, const Mat2& m) {
  Mat2 out;
  for (int i = 0; i < 4; ++i) out.a[i] = s * m.a[i];
  return out;
}
/// Frobenius inner product A : B.
constexpr double contract(const Mat2& l, const Mat2& r) {
  return l.a[0] * r.a[0] + l.a[1] * r.a[1] + l.a[2] * r.a[2] + l.a[3] * r.a[3];
}

/// Symmetric 2x2 Hessian of a scalar: (xx, xy, yy).
struct Hess2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;
};

}  // namespace mpfs
