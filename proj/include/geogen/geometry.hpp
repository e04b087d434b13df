#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <vector>

namespace geogen {

using Vec2 = Eigen::Vector2d;

inline double cross2(const Vec2& u, const Vec2& v) { return u.x() * v.y() - u.y() * v.x(); }

inline Vec2 rot90(const Vec2& u) { return Vec2(-u.y(), u.x()); }

inline Vec2 dir_of(double angle_rad) { return Vec2(std::cos(angle_rad), std::sin(angle_rad)); }

inline Vec2 dir_of(const Vec2& from, const Vec2& to) { return (to - from).normalized(); }

inline Vec2 midpoint_of(const Vec2& a, const Vec2& b) { return 0.5 * (a + b); }

// angle between two directions, in [0, pi]
inline double angle_between(const Vec2& u, const Vec2& v) {
    return std::atan2(std::abs(cross2(u, v)), u.dot(v));
}

// interior angle at `vertex` spanned by rays toward p and q
inline double angle_at(const Vec2& vertex, const Vec2& p, const Vec2& q) {
    return angle_between(p - vertex, q - vertex);
}

inline double deg_of(double rad) { return rad * 180.0 / M_PI; }
inline double rad_of(double deg) { return deg * M_PI / 180.0; }

// parameter t of the projection of p onto the line a + t*(b-a)
inline double project_param(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 d = b - a;
    return (p - a).dot(d) / d.squaredNorm();
}

inline Vec2 foot_of(const Vec2& p, const Vec2& a, const Vec2& b) {
    return a + project_param(p, a, b) * (b - a);
}

inline Vec2 reflect_across(const Vec2& p, const Vec2& a, const Vec2& b) {
    return 2.0 * foot_of(p, a, b) - p;
}

inline double point_line_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    return std::abs(cross2(b - a, p - a)) / (b - a).norm();
}

inline std::optional<Vec2> circumcenter_of(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double d = 2.0 * cross2(b - a, c - a);
    const double scale = std::max({(b - a).norm(), (c - a).norm(), (c - b).norm()});
    if (std::abs(d) < 1e-12 * scale * scale) return std::nullopt;
    const double a2 = a.squaredNorm(), b2 = b.squaredNorm(), c2 = c.squaredNorm();
    const double ux = (a2 * (b.y() - c.y()) + b2 * (c.y() - a.y()) + c2 * (a.y() - b.y())) / d;
    const double uy = (a2 * (c.x() - b.x()) + b2 * (a.x() - c.x()) + c2 * (b.x() - a.x())) / d;
    return Vec2(ux, uy);
}

inline std::optional<Vec2> incenter_of(const Vec2& a, const Vec2& b, const Vec2& c) {
    const double wa = (c - b).norm(), wb = (a - c).norm(), wc = (b - a).norm();
    const double s = wa + wb + wc;
    if (s < 1e-12 || std::abs(cross2(b - a, c - a)) < 1e-12) return std::nullopt;
    return Vec2((wa * a + wb * b + wc * c) / s);
}

// intersection of lines (a,b) and (c,d)
inline std::optional<Vec2> line_intersection(const Vec2& a, const Vec2& b, const Vec2& c,
                                             const Vec2& d) {
    const Vec2 r = b - a, s = d - c;
    const double den = cross2(r, s);
    if (std::abs(den) < 1e-12 * r.norm() * s.norm()) return std::nullopt;
    const double t = cross2(c - a, s) / den;
    return Vec2(a + t * r);
}

// intersections of line (a,b) with the circle centered o of radius r,
// ordered by the line parameter
inline std::vector<Vec2> line_circle_intersections(const Vec2& a, const Vec2& b, const Vec2& o,
                                                   double r) {
    const Vec2 u = (b - a).normalized();
    const Vec2 w = a - o;
    const double pb = u.dot(w);
    const double disc = pb * pb - (w.squaredNorm() - r * r);
    std::vector<Vec2> out;
    if (disc < 0.0) return out;
    const double root = std::sqrt(disc);
    out.push_back(a + (-pb - root) * u);
    if (root > 1e-12) out.push_back(a + (-pb + root) * u);
    return out;
}

}  // namespace geogen
