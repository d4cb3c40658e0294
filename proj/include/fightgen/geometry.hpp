#pragma once

#include <cmath>
#include <numbers>

namespace fightgen {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2&) const = default;

    double norm() const { return std::sqrt(x * x + y * y); }
};

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    if (a > -std::numbers::pi && a <= std::numbers::pi) return a;
    a = std::fmod(a, two_pi);
    if (a <= -std::numbers::pi) a += two_pi;
    else if (a > std::numbers::pi) a -= two_pi;
    return a;
}

inline Vec2 rotate(Vec2 v, double c, double s) { return {c * v.x - s * v.y, s * v.x + c * v.y}; }

inline Vec2 rotate(Vec2 v, double angle) { return rotate(v, std::cos(angle), std::sin(angle)); }

/// Root position and heading of a fighter on the floor plane.
struct Pose {
    Vec2 pos;
    double facing = 0.0;

    bool operator==(const Pose&) const = default;
};

/// Offset of a pose relative to some reference frame: displacement expressed
/// in the reference heading, plus accumulated yaw.
struct LocalOffset {
    Vec2 offset;
    double yaw = 0.0;

    bool operator==(const LocalOffset&) const = default;
};

/// Heading error between `from`'s facing and the direction to `target`.
/// Coincident positions fall back to zero error.
inline double bearing_error(const Pose& from, Vec2 target) {
    const Vec2 d = target - from.pos;
    if (d.x == 0.0 && d.y == 0.0) return 0.0;
    return wrap_angle(std::atan2(d.y, d.x) - from.facing);
}

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

}  // namespace fightgen
