#pragma once

#include <cmath>

namespace irrl {

inline constexpr double kPi = 3.14159265358979323846;

/// Minimal 2D vector used for positions, velocities and actions (meters / m/s).
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    Vec2& operator-=(const Vec2& o) {
        x -= o.x;
        y -= o.y;
        return *this;
    }
    Vec2& operator*=(double s) {
        x *= s;
        y *= s;
        return *this;
    }
    constexpr bool operator==(const Vec2& o) const = default;

    double norm() const { return std::hypot(x, y); }
    constexpr double norm_sq() const { return x * x + y * y; }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return {v.x * s, v.y * s}; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

/// z-component of the cross product (signed parallelogram area).
constexpr double det(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

/// Counter-clockwise perpendicular.
constexpr Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }

inline double distance(const Vec2& a, const Vec2& b) { return (a - b).norm(); }

/// Unit vector toward `v`; zero vector if `v` is shorter than `eps`.
inline Vec2 unit_or_zero(const Vec2& v, double eps = 1e-9) {
    const double n = v.norm();
    if (n < eps) return {0.0, 0.0};
    return v / n;
}

/// Clip `v` to the disc of radius `max_norm`.
inline Vec2 clip_norm(const Vec2& v, double max_norm) {
    const double n = v.norm();
    if (n <= max_norm || n == 0.0) return v;
    return v * (max_norm / n);
}

/// Rotate by angle (radians, counter-clockwise).
inline Vec2 rotate(const Vec2& v, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

}  // namespace irrl
