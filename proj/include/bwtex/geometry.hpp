#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <variant>
#include <vector>

namespace bwtex {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2&) const = default;

    double length() const { return std::hypot(x, y); }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

inline constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Wraps an angle into [0, period).
inline double wrap_angle(double deg, double period = 360.0) {
    double r = std::fmod(deg, period);
    if (r < 0.0) r += period;
    if (r >= period) r = 0.0;
    return r;
}

/// 2D affine map using the SVG matrix(a b c d e f) convention:
/// x' = a*x + c*y + e, y' = b*x + d*y + f.
struct Affine {
    double a = 1, b = 0, c = 0, d = 1, e = 0, f = 0;

    static Affine translate(double tx, double ty) { return {1, 0, 0, 1, tx, ty}; }
    static Affine scale(double s) { return {s, 0, 0, s, 0, 0}; }
    static Affine rotate(double deg) {
        const double r = deg_to_rad(deg);
        const double cs = std::cos(r), sn = std::sin(r);
        return {cs, sn, -sn, cs, 0, 0};
    }
    static Affine skew_x(double deg) { return {1, 0, std::tan(deg_to_rad(deg)), 1, 0, 0}; }

    Vec2 apply(Vec2 p) const { return {a * p.x + c * p.y + e, b * p.x + d * p.y + f}; }

    /// this ∘ other: apply `other` first.
    Affine then_after(const Affine& o) const {
        return {a * o.a + c * o.b, b * o.a + d * o.b, a * o.c + c * o.d, b * o.c + d * o.d,
                a * o.e + c * o.f + e, b * o.e + d * o.f + f};
    }

    double determinant() const { return a * d - b * c; }

    Affine inverse() const {
        const double det = determinant();
        const double ia = d / det, ib = -b / det, ic = -c / det, id = a / det;
        return {ia, ib, ic, id, -(ia * e + ic * f), -(ib * e + id * f)};
    }

    bool is_identity() const { return a == 1 && b == 0 && c == 0 && d == 1 && e == 0 && f == 0; }
};

struct Box {
    Vec2 min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    Vec2 max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};

    void expand(Vec2 p) {
        min = {std::min(min.x, p.x), std::min(min.y, p.y)};
        max = {std::max(max.x, p.x), std::max(max.y, p.y)};
    }
    void expand(const Box& o) {
        expand(o.min);
        expand(o.max);
    }
    Box inflated(double r) const { return {{min.x - r, min.y - r}, {max.x + r, max.y + r}}; }
    bool empty() const { return !(min.x <= max.x && min.y <= max.y); }
    bool intersects(const Box& o) const {
        return min.x < o.max.x && o.min.x < max.x && min.y < o.max.y && o.min.y < max.y;
    }
    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
};

using Contour = std::vector<Vec2>;

/// Closed contours filled with the even-odd rule.
struct Polygon {
    std::vector<Contour> contours;
};

struct Circle {
    Vec2 center;
    double radius = 0.0;
};

/// Annulus between `inner` and `outer` radii (a stroked circle).
struct Ring {
    Vec2 center;
    double outer = 0.0;
    double inner = 0.0;
};

/// Pie wedge in y-down device space. Angles are clockwise from 12 o'clock.
struct Sector {
    Vec2 center;
    double radius = 0.0;
    double start_deg = 0.0;
    double sweep_deg = 0.0;
};

using Shape = std::variant<Circle, Ring, Polygon, Sector>;

inline Polygon rectangle(double x, double y, double w, double h) {
    return Polygon{{Contour{{x, y}, {x + w, y}, {x + w, y + h}, {x, y + h}}}};
}

inline Vec2 sector_point(Vec2 center, double radius, double angle_deg) {
    const double r = deg_to_rad(angle_deg);
    return {center.x + radius * std::sin(r), center.y - radius * std::cos(r)};
}

namespace detail {

inline bool contour_crossings(const Contour& c, Vec2 p) {
    bool inside = false;
    const std::size_t n = c.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = c[i], b = c[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + ab * t)).length();
}

/// Clockwise angle from 12 o'clock of `p` around `c`, in [0, 360).
inline double bearing(Vec2 c, Vec2 p) {
    return wrap_angle(rad_to_deg(std::atan2(p.x - c.x, -(p.y - c.y))));
}

inline bool in_sweep(double angle, double start, double sweep) {
    if (sweep >= 360.0) return true;
    return wrap_angle(angle - start) < sweep;
}

} // namespace detail

inline bool contains(const Shape& shape, Vec2 p) {
    return std::visit(
        [&](const auto& s) -> bool {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Circle>) {
                const Vec2 d = p - s.center;
                return dot(d, d) <= s.radius * s.radius;
            } else if constexpr (std::is_same_v<T, Ring>) {
                const Vec2 d = p - s.center;
                const double r2 = dot(d, d);
                return r2 <= s.outer * s.outer && r2 >= s.inner * s.inner;
            } else if constexpr (std::is_same_v<T, Polygon>) {
                bool inside = false;
                for (const auto& c : s.contours)
                    if (c.size() >= 3 && detail::contour_crossings(c, p)) inside = !inside;
                return inside;
            } else {
                const Vec2 d = p - s.center;
                if (dot(d, d) > s.radius * s.radius) return false;
                if (s.sweep_deg <= 0.0) return false;
                return detail::in_sweep(detail::bearing(s.center, p), s.start_deg, s.sweep_deg);
            }
        },
        shape);
}

inline Box bounds(const Shape& shape) {
    return std::visit(
        [](const auto& s) -> Box {
            using T = std::decay_t<decltype(s)>;
            Box b;
            if constexpr (std::is_same_v<T, Circle>) {
                b.expand(s.center - Vec2{s.radius, s.radius});
                b.expand(s.center + Vec2{s.radius, s.radius});
            } else if constexpr (std::is_same_v<T, Ring>) {
                b.expand(s.center - Vec2{s.outer, s.outer});
                b.expand(s.center + Vec2{s.outer, s.outer});
            } else if constexpr (std::is_same_v<T, Polygon>) {
                for (const auto& c : s.contours)
                    for (const auto& v : c) b.expand(v);
            } else {
                b.expand(s.center - Vec2{s.radius, s.radius});
                b.expand(s.center + Vec2{s.radius, s.radius});
            }
            return b;
        },
        shape);
}

/// Euclidean distance from `p` to the boundary of `shape`.
inline double boundary_distance(const Shape& shape, Vec2 p) {
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Circle>) {
                return std::abs((p - s.center).length() - s.radius);
            } else if constexpr (std::is_same_v<T, Ring>) {
                const double d = (p - s.center).length();
                return std::min(std::abs(d - s.outer), std::abs(d - s.inner));
            } else if constexpr (std::is_same_v<T, Polygon>) {
                double best = std::numeric_limits<double>::infinity();
                for (const auto& c : s.contours) {
                    const std::size_t n = c.size();
                    for (std::size_t i = 0, j = n - 1; i < n; j = i++)
                        best = std::min(best, detail::segment_distance(p, c[j], c[i]));
                }
                return best;
            } else {
                const double d = (p - s.center).length();
                if (s.sweep_deg >= 360.0) return std::abs(d - s.radius);
                const Vec2 a = sector_point(s.center, s.radius, s.start_deg);
                const Vec2 b = sector_point(s.center, s.radius, s.start_deg + s.sweep_deg);
                double best = std::min(detail::segment_distance(p, s.center, a),
                                       detail::segment_distance(p, s.center, b));
                if (d > 0 && detail::in_sweep(detail::bearing(s.center, p), s.start_deg, s.sweep_deg))
                    best = std::min(best, std::abs(d - s.radius));
                else
                    best = std::min({best, (p - a).length(), (p - b).length()});
                return best;
            }
        },
        shape);
}

inline Shape translated(const Shape& shape, Vec2 by) {
    return std::visit(
        [&](const auto& s) -> Shape {
            using T = std::decay_t<decltype(s)>;
            T out = s;
            if constexpr (std::is_same_v<T, Polygon>) {
                for (auto& c : out.contours)
                    for (auto& v : c) v = v + by;
            } else {
                out.center = out.center + by;
            }
            return out;
        },
        shape);
}

inline Polygon transformed(const Polygon& poly, const Affine& m) {
    Polygon out = poly;
    for (auto& c : out.contours)
        for (auto& v : c) v = m.apply(v);
    return out;
}

/// Radius of the largest disc inside `shape`. Exact for circles, rings and
/// sectors; polygons are searched on a grid and refined locally.
inline double inradius(const Shape& shape) {
    if (const auto* c = std::get_if<Circle>(&shape)) return c->radius;
    if (const auto* r = std::get_if<Ring>(&shape)) return (r->outer - r->inner) / 2.0;
    if (const auto* s = std::get_if<Sector>(&shape)) {
        if (s->sweep_deg <= 0.0) return 0.0;
        if (s->sweep_deg >= 180.0) return s->radius / 2.0;
        const double h = std::sin(deg_to_rad(s->sweep_deg / 2.0));
        return s->radius * h / (1.0 + h);
    }
    const Box b = bounds(shape);
    if (b.empty()) return 0.0;
    constexpr int kGrid = 48;
    double best = 0.0;
    Vec2 best_p = b.min;
    for (int iy = 0; iy < kGrid; ++iy) {
        for (int ix = 0; ix < kGrid; ++ix) {
            const Vec2 p{b.min.x + (ix + 0.5) * b.width() / kGrid, b.min.y + (iy + 0.5) * b.height() / kGrid};
            if (!contains(shape, p)) continue;
            const double d = boundary_distance(shape, p);
            if (d > best) {
                best = d;
                best_p = p;
            }
        }
    }
    double step = std::max(b.width(), b.height()) / kGrid;
    while (step > 1e-6 * std::max(1.0, std::max(b.width(), b.height()))) {
        bool moved = false;
        for (const Vec2 dir : {Vec2{1, 0}, Vec2{-1, 0}, Vec2{0, 1}, Vec2{0, -1}}) {
            const Vec2 q = best_p + dir * step;
            if (!contains(shape, q)) continue;
            const double d = boundary_distance(shape, q);
            if (d > best) {
                best = d;
                best_p = q;
                moved = true;
            }
        }
        if (!moved) step /= 2.0;
    }
    return best;
}

inline double polygon_area(const Contour& c) {
    double a = 0.0;
    const std::size_t n = c.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) a += c[j].x * c[i].y - c[i].x * c[j].y;
    return a / 2.0;
}

inline Vec2 contour_centroid(const Contour& c) {
    double a = 0.0, cx = 0.0, cy = 0.0;
    const std::size_t n = c.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double cross = c[j].x * c[i].y - c[i].x * c[j].y;
        a += cross;
        cx += (c[j].x + c[i].x) * cross;
        cy += (c[j].y + c[i].y) * cross;
    }
    if (a == 0.0) return c.empty() ? Vec2{} : c.front();
    return {cx / (3.0 * a), cy / (3.0 * a)};
}

/// True when no two non-adjacent edges of the contour intersect.
inline bool is_simple(const Contour& c) {
    const std::size_t n = c.size();
    if (n < 3) return false;
    auto orient = [](Vec2 a, Vec2 b, Vec2 p) {
        const double v = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
        return (v > 0) - (v < 0);
    };
    auto on_segment = [](Vec2 a, Vec2 b, Vec2 p) {
        return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
               p.y <= std::max(a.y, b.y);
    };
    auto intersects = [&](Vec2 a, Vec2 b, Vec2 c2, Vec2 d) {
        const int o1 = orient(a, b, c2), o2 = orient(a, b, d), o3 = orient(c2, d, a), o4 = orient(c2, d, b);
        if (o1 != o2 && o3 != o4) return true;
        if (o1 == 0 && on_segment(a, b, c2)) return true;
        if (o2 == 0 && on_segment(a, b, d)) return true;
        if (o3 == 0 && on_segment(c2, d, a)) return true;
        if (o4 == 0 && on_segment(c2, d, b)) return true;
        return false;
    };
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (intersects(c[i], c[(i + 1) % n], c[j], c[(j + 1) % n])) return false;
        }
    }
    return true;
}

} // namespace bwtex
