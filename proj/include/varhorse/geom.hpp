#ifndef VARHORSE_GEOM_HPP
#define VARHORSE_GEOM_HPP

#include <array>
#include <cmath>
#include <numbers>

namespace varhorse {

inline constexpr double kPi = std::numbers::pi;

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::hypot(x, y); }
    double norm_max() const { return std::max(std::fabs(x), std::fabs(y)); }
    Vec2 normalized() const { double n = norm(); return {x / n, y / n}; }
    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

// angle between the lines spanned by u and v, in [0, pi/2]
inline double line_angle(const Vec2& u, const Vec2& v) {
    return std::atan2(std::fabs(u.cross(v)), std::fabs(u.dot(v)));
}

struct Mat2 {
    // row-major: [[a, b], [c, d]]
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

    Mat2() = default;
    Mat2(double a_, double b_, double c_, double d_) : a(a_), b(b_), c(c_), d(d_) {}

    static Mat2 identity() { return {1, 0, 0, 1}; }
    static Mat2 rotation(double t) { return {std::cos(t), -std::sin(t), std::sin(t), std::cos(t)}; }
    static Mat2 diag(double s, double u) { return {s, 0, 0, u}; }
    static Mat2 columns(const Vec2& c1, const Vec2& c2) { return {c1.x, c2.x, c1.y, c2.y}; }

    Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2 operator*(const Mat2& m) const {
        return {a * m.a + b * m.c, a * m.b + b * m.d, c * m.a + d * m.c, c * m.b + d * m.d};
    }
    Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }

    double det() const { return a * d - b * c; }
    double norm_inf() const {
        return std::max(std::fabs(a) + std::fabs(b), std::fabs(c) + std::fabs(d));
    }
    Mat2 transpose() const { return {a, c, b, d}; }
    Mat2 inverse() const {
        double dt = det();
        return {d / dt, -b / dt, -c / dt, a / dt};
    }
    Vec2 col(int j) const { return j == 0 ? Vec2{a, c} : Vec2{b, d}; }

    // largest singular value
    double sigma_max() const {
        double t = a * a + b * b + c * c + d * d;
        double dd = det();
        double disc = std::sqrt(std::max(0.0, t * t - 4.0 * dd * dd));
        return std::sqrt(0.5 * (t + disc));
    }
};

// Givens QR with positive diagonal: M = Q * R, R upper triangular, r11, r22 > 0.
struct QrPair {
    Mat2 q, r;
};

inline QrPair qr_decompose(const Mat2& m) {
    double r1 = std::hypot(m.a, m.c);
    Mat2 q;
    if (r1 == 0.0) {
        q = Mat2::identity();
    } else {
        double co = m.a / r1, si = m.c / r1;
        q = {co, -si, si, co};
    }
    Mat2 r = q.transpose() * m;
    r.c = 0.0;  // exact by construction
    if (r.d < 0.0) {
        r.d = -r.d;
        r.b = -r.b;  // flip second row of R and second column of Q
        q.b = -q.b;
        q.d = -q.d;
    }
    if (r.a < 0.0) {  // r1 == 0 degenerate path
        r.a = -r.a;
        r.b = -r.b;
        q.a = -q.a;
        q.c = -q.c;
    }
    return {q, r};
}

// shortest representative of t mod 1 in [-1/2, 1/2)
inline double wrap_half(double t) {
    double w = t - std::floor(t + 0.5);
    if (w >= 0.5) w -= 1.0;  // guard against rounding at the seam
    return w;
}

// canonical representative in [0, 1)
inline double wrap_unit(double t) {
    double w = t - std::floor(t);
    if (w >= 1.0) w -= 1.0;
    if (w < 0.0) w += 1.0;
    return w;
}

}  // namespace varhorse

#endif
