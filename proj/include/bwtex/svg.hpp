#pragma once

#include "bwtex/error.hpp"
#include "bwtex/geometry.hpp"

#include <charconv>
#include <cstdlib>
#include <string>
#include <string_view>

namespace bwtex::svg {

/// Shortest decimal that round-trips to the same double. Output is locale
/// independent and identical across runs.
inline std::string num(double v) {
    if (v == 0.0) return "0";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char ch : text) {
        switch (ch) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += ch;
        }
    }
    return out;
}

inline std::string gray_hex(double level) {
    const int v = static_cast<int>(std::lround(std::clamp(level, 0.0, 1.0) * 255.0));
    static constexpr char kHex[] = "0123456789abcdef";
    std::string s = "#";
    for (int k = 0; k < 3; ++k) {
        s += kHex[v >> 4];
        s += kHex[v & 15];
    }
    return s;
}

inline std::string path_data(const Polygon& poly) {
    std::string d;
    for (const auto& c : poly.contours) {
        if (c.empty()) continue;
        if (!d.empty()) d += ' ';
        d += "M" + num(c[0].x) + "," + num(c[0].y);
        for (std::size_t i = 1; i < c.size(); ++i) d += " L" + num(c[i].x) + "," + num(c[i].y);
        d += " Z";
    }
    return d;
}

/// Path data for a clockwise-from-12-o'clock wedge.
inline std::string sector_path(const Sector& s) {
    if (s.sweep_deg >= 360.0) {
        const Vec2 top = sector_point(s.center, s.radius, 0.0);
        const Vec2 bottom = sector_point(s.center, s.radius, 180.0);
        const std::string r = num(s.radius);
        return "M" + num(top.x) + "," + num(top.y) + " A" + r + "," + r + " 0 1,1 " + num(bottom.x) + "," +
               num(bottom.y) + " A" + r + "," + r + " 0 1,1 " + num(top.x) + "," + num(top.y) + " Z";
    }
    const Vec2 a = sector_point(s.center, s.radius, s.start_deg);
    const Vec2 b = sector_point(s.center, s.radius, s.start_deg + s.sweep_deg);
    const std::string r = num(s.radius);
    return "M" + num(s.center.x) + "," + num(s.center.y) + " L" + num(a.x) + "," + num(a.y) + " A" + r + "," + r +
           " 0 " + (s.sweep_deg > 180.0 ? "1" : "0") + ",1 " + num(b.x) + "," + num(b.y) + " Z";
}

/// Geometry of any shape as an SVG element opening (without paint attributes).
inline std::string shape_element(const Shape& shape) {
    return std::visit(
        [](const auto& s) -> std::string {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, Circle>) {
                return "<circle cx=\"" + num(s.center.x) + "\" cy=\"" + num(s.center.y) + "\" r=\"" + num(s.radius) + "\"";
            } else if constexpr (std::is_same_v<T, Ring>) {
                return "<circle cx=\"" + num(s.center.x) + "\" cy=\"" + num(s.center.y) + "\" r=\"" +
                       num((s.outer + s.inner) / 2.0) + "\"";
            } else if constexpr (std::is_same_v<T, Polygon>) {
                return "<path d=\"" + path_data(s) + "\"";
            } else {
                return "<path d=\"" + sector_path(s) + "\"";
            }
        },
        shape);
}

/// Parses the M/L/Z subset written by path_data().
inline Polygon parse_path_data(std::string_view d) {
    Polygon poly;
    std::size_t pos = 0;
    auto skip = [&] {
        while (pos < d.size() && (d[pos] == ' ' || d[pos] == ',' || d[pos] == '\n' || d[pos] == '\t')) ++pos;
    };
    auto number = [&]() -> double {
        skip();
        double v = 0.0;
        const auto res = std::from_chars(d.data() + pos, d.data() + d.size(), v);
        if (res.ec != std::errc{}) fail(ErrorCode::ParseError, "bad number in path data at offset " + std::to_string(pos));
        pos = static_cast<std::size_t>(res.ptr - d.data());
        return v;
    };
    char cmd = 0;
    while (true) {
        skip();
        if (pos >= d.size()) break;
        const char ch = d[pos];
        if (ch == 'M' || ch == 'L' || ch == 'Z' || ch == 'z') {
            cmd = ch;
            ++pos;
            if (cmd == 'M') poly.contours.emplace_back();
            if (cmd == 'Z' || cmd == 'z') continue;
        } else if (cmd != 'M' && cmd != 'L') {
            fail(ErrorCode::ParseError, std::string("unsupported path command '") + ch + "'");
        }
        if (poly.contours.empty()) fail(ErrorCode::ParseError, "path data must start with M");
        const double x = number();
        const double y = number();
        poly.contours.back().push_back({x, y});
    }
    return poly;
}

} // namespace bwtex::svg
