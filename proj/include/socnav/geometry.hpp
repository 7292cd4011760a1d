#pragma once

#include <cmath>

namespace socnav {

inline constexpr double kPi = 3.14159265358979323846;

/// Plain 2-D vector, meters unless noted otherwise.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double squared_norm() const { return x * x + y * y; }
    double norm() const { return std::hypot(x, y); }

    /// Unit vector; the zero vector normalizes to zero.
    Vec2 normalized() const {
        const double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{};
    }

    /// Left-hand normal (90 deg counter-clockwise).
    Vec2 left_normal() const { return {-y, x}; }

    Vec2 rotated(double angle) const {
        const double c = std::cos(angle), s = std::sin(angle);
        return {c * x - s * y, s * x + c * y};
    }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

/// Wrap an angle into (-pi, pi].
inline double wrap_angle(double a) {
    double r = std::fmod(a + kPi, 2.0 * kPi);
    if (r <= 0.0) r += 2.0 * kPi;
    return r - kPi;
}

/// Bearing of `to` as seen from `from`, world frame.
inline double bearing(const Vec2& from, const Vec2& to) {
    return std::atan2(to.y - from.y, to.x - from.x);
}

inline Vec2 heading_vector(double yaw) { return {std::cos(yaw), std::sin(yaw)}; }

/// Clamp the norm of v to at most `limit`.
inline Vec2 clamp_norm(const Vec2& v, double limit) {
    const double n = v.norm();
    if (n <= limit || n == 0.0) return v;
    return v * (limit / n);
}

/// Pose in the plane. yaw is kept in (-pi, pi].
struct Pose2D {
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;

    Pose2D() = default;
    Pose2D(double x_, double y_, double yaw_) : x(x_), y(y_), yaw(wrap_angle(yaw_)) {}

    Vec2 position() const { return {x, y}; }
    void set_position(const Vec2& p) { x = p.x; y = p.y; }
    void set_yaw(double a) { yaw = wrap_angle(a); }

    bool operator==(const Pose2D& o) const { return x == o.x && y == o.y && yaw == o.yaw; }
};

/// Shortest-turn step from `yaw` toward `target_yaw`, rate-limited.
inline double turn_toward(double yaw, double target_yaw, double max_step) {
    const double delta = wrap_angle(target_yaw - yaw);
    if (std::abs(delta) <= max_step) return wrap_angle(target_yaw);
    return wrap_angle(yaw + (delta > 0.0 ? max_step : -max_step));
}

}  // namespace socnav
