#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace scrunch {

struct Vec3 {
  double x = 0, y = 0, z = 0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec3 normalized() const {
    const double n = norm();
    return n > 0 ? Vec3{x / n, y / n, z / n} : Vec3{};
  }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
};

struct Vec4 {
  double x = 0, y = 0, z = 0, w = 0;

  Vec4() = default;
  Vec4(double x_, double y_, double z_, double w_ = 0) : x(x_), y(y_), z(z_), w(w_) {}
  explicit Vec4(const Vec3& v) : x(v.x), y(v.y), z(v.z), w(0) {}

  Vec4 operator+(const Vec4& o) const { return {x + o.x, y + o.y, z + o.z, w + o.w}; }
  Vec4 operator-(const Vec4& o) const { return {x - o.x, y - o.y, z - o.z, w - o.w}; }
  Vec4 operator*(double s) const { return {x * s, y * s, z * s, w * s}; }
  double dot(const Vec4& o) const { return x * o.x + y * o.y + z * o.z + w * o.w; }
  double norm() const { return std::sqrt(dot(*this)); }
  Vec4 normalized() const {
    const double n = norm();
    return n > 0 ? Vec4{x / n, y / n, z / n, w / n} : Vec4{};
  }
  Vec3 xyz() const { return {x, y, z}; }
  double& operator[](std::size_t i) { return (&x)[i]; }
  double operator[](std::size_t i) const { return (&x)[i]; }
};

inline double clamp(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

// Angle between two unit vectors, stable near 0 and pi.
inline double unit_angle(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

}  // namespace scrunch
