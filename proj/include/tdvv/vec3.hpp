#pragma once

#include <cmath>

namespace tdvv {

inline constexpr double kPi = 3.14159265358979323846;

/// Plain 3-vector in the FOA frame: x front, y left, z up.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
    constexpr double norm2() const { return dot(*this); }
    Vec3 normalized() const {
        const double n = norm();
        return {x / n, y / n, z / n};
    }
};

inline constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double deg_to_rad(double d) { return d * kPi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / kPi; }

/// Angle between two vectors in degrees, safe against rounding at +/-1.
inline double angle_between_deg(const Vec3& a, const Vec3& b) {
    const double na = a.norm();
    const double nb = b.norm();
    double c = a.dot(b) / (na * nb);
    if (c > 1.0) c = 1.0;
    if (c < -1.0) c = -1.0;
    return rad_to_deg(std::acos(c));
}

/// Azimuth: angle in the xy-plane, measured from +x toward +y.
inline double azimuth_deg(const Vec3& v) { return rad_to_deg(std::atan2(v.y, v.x)); }

/// Elevation: angle from the xy-plane, positive toward +z.
inline double elevation_deg(const Vec3& v) {
    double s = v.z / v.norm();
    if (s > 1.0) s = 1.0;
    if (s < -1.0) s = -1.0;
    return rad_to_deg(std::asin(s));
}

inline Vec3 unit_from_angles_deg(double azimuth, double elevation) {
    const double az = deg_to_rad(azimuth);
    const double el = deg_to_rad(elevation);
    return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

}  // namespace tdvv
