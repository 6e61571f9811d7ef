#pragma once

// Small 2D vector / triangle helpers used across the mesh kernel.

#include <array>
#include <cmath>
#include <vector>

namespace trm {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm2(const Vec2& a) { return a.x * a.x + a.y * a.y; }
inline double norm(const Vec2& a) { return std::sqrt(norm2(a)); }
inline double dist(const Vec2& a, const Vec2& b) { return norm(a - b); }
inline double dist2(const Vec2& a, const Vec2& b) { return norm2(a - b); }

inline Vec2 normalized(const Vec2& a) {
    double n = norm(a);
    return n > 0.0 ? a / n : Vec2{0.0, 0.0};
}

// 90 degree counter-clockwise rotation (left-hand normal of a tangent).
inline Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

// Twice the signed area of triangle (a,b,c); positive for CCW.
inline double tri_area2(const Vec2& a, const Vec2& b, const Vec2& c) {
    return cross(b - a, c - a);
}

inline double tri_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * tri_area2(a, b, c);
}

// Shape quality in (0,1]; 1 for an equilateral triangle, -> 0 for slivers.
inline double tri_quality(const Vec2& a, const Vec2& b, const Vec2& c) {
    double l2 = dist2(a, b) + dist2(b, c) + dist2(c, a);
    if (l2 <= 0.0) return 0.0;
    return 4.0 * std::sqrt(3.0) * tri_area(a, b, c) / l2;
}

// Squared distance from p to segment [a,b].
inline double point_segment_dist2(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double t = norm2(ab) > 0.0 ? dot(p - a, ab) / norm2(ab) : 0.0;
    t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    return dist2(p, a + ab * t);
}

// Reflection of v across the direction t (t need not be unit length).
inline Vec2 reflect_across(const Vec2& v, const Vec2& t) {
    Vec2 u = normalized(t);
    return u * (2.0 * dot(v, u)) - v;
}

inline double polygon_area(const std::vector<Vec2>& poly) {
    double a = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        a += cross(p, q);
    }
    return 0.5 * a;
}

} // namespace trm
