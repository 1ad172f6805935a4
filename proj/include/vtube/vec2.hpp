#pragma once

#include <cmath>

namespace vtube {

/// Plain 2-D vector. All swarm math is planar, so a hand-rolled type keeps
/// the hot loops simple and allocation-free.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm_sq() const { return x * x + y * y; }
    double norm() const { return std::sqrt(norm_sq()); }

    Vec2 normalized() const {
        double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
    }

    /// 90-degree counterclockwise rotation.
    Vec2 perp() const { return {-y, x}; }

    bool operator==(const Vec2& o) const = default;
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

inline bool is_finite(const Vec2& v) {
    return std::isfinite(v.x) && std::isfinite(v.y);
}

/// 2x2 matrix, row-major: [[a, b], [c, d]].
struct Mat2 {
    double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    /// Outer product u * v^T.
    static Mat2 outer(const Vec2& u, const Vec2& v) {
        return {u.x * v.x, u.x * v.y, u.y * v.x, u.y * v.y};
    }

    Vec2 operator*(const Vec2& v) const {
        return {a * v.x + b * v.y, c * v.x + d * v.y};
    }

    Mat2 operator*(const Mat2& m) const {
        return {a * m.a + b * m.c, a * m.b + b * m.d,
                c * m.a + d * m.c, c * m.b + d * m.d};
    }

    Mat2 operator-(const Mat2& m) const {
        return {a - m.a, b - m.b, c - m.c, d - m.d};
    }

    Mat2 operator+(const Mat2& m) const {
        return {a + m.a, b + m.b, c + m.c, d + m.d};
    }

    Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }

    double max_abs() const {
        return std::max(std::max(std::fabs(a), std::fabs(b)),
                        std::max(std::fabs(c), std::fabs(d)));
    }

    bool operator==(const Mat2& o) const = default;
};

}  // namespace vtube
