#pragma once

#include <cmath>
#include <string>

namespace ensemble {

// World coordinates in meters. The y axis points up; the ground plane is
// horizontal (constant y).
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Vec3 operator*(double s, const Vec3& v) {
    return {s * v.x, s * v.y, s * v.z};
  }
  friend bool operator==(const Vec3&, const Vec3&) = default;

  double Norm() const { return std::sqrt(x * x + y * y + z * z); }
  bool IsFinite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

// Distance in the ground plane, ignoring height.
inline double HorizontalDistance(const Vec3& a, const Vec3& b) {
  return std::hypot(a.x - b.x, a.z - b.z);
}

// "(x,y,z)" using the shortest round-trippable representation.
std::string FormatVec3(const Vec3& v);

}  // namespace ensemble
