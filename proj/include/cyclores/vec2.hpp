#pragma once

#include <cmath>
#include <ostream>

namespace cyclores {

/// Plane vector used for positions, momenta and field values.
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
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
inline double norm2(const Vec2& a) { return dot(a, a); }

// Global orientation convention: the direct perpendicular a^perp = (-a2, a1),
// i.e. rotation by +pi/2.  Fixed once so that [v1, v2] = i for v = D - q^perp/2.
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

/// Counter-clockwise rotation by angle t applied to a vector.
inline Vec2 rot(double t, const Vec2& a) {
    const double c = std::cos(t), s = std::sin(t);
    return {c * a.x - s * a.y, s * a.x + c * a.y};
}

inline bool finite(const Vec2& a) { return std::isfinite(a.x) && std::isfinite(a.y); }

inline std::ostream& operator<<(std::ostream& os, const Vec2& v) {
    return os << "(" << v.x << ", " << v.y << ")";
}

}  // namespace cyclores
