#pragma once

#include "bwtex/error.hpp"
#include "bwtex/geometry.hpp"
#include "bwtex/svg.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace bwtex {

enum class IconDetail { Detailed, Simplified };
enum class IconWeight { Outline, Filled };

struct IconStyle {
    IconDetail detail = IconDetail::Detailed;
    IconWeight weight = IconWeight::Outline;

    bool operator==(const IconStyle&) const = default;
};

inline std::string_view to_string(IconDetail d) { return d == IconDetail::Detailed ? "detailed" : "simplified"; }
inline std::string_view to_string(IconWeight w) { return w == IconWeight::Outline ? "outline" : "filled"; }

inline constexpr std::array<IconStyle, 4> kIconStyles{{
    {IconDetail::Detailed, IconWeight::Outline},
    {IconDetail::Detailed, IconWeight::Filled},
    {IconDetail::Simplified, IconWeight::Outline},
    {IconDetail::Simplified, IconWeight::Filled},
}};

/// Category names of the seven data items, alphabetical.
inline constexpr std::array<std::string_view, 7> kVegetables{
    "carrots", "celery", "corn", "eggplant", "mushrooms", "olives", "tomatoes"};

/// Glyph base names, index-aligned with kVegetables.
inline constexpr std::array<std::string_view, 7> kGlyphBases{
    "carrot", "celery", "corn", "eggplant", "mushroom", "olive", "tomato"};

inline std::string glyph_id(std::string_view base, IconStyle style) {
    return std::string(base) + "." + std::string(to_string(style.detail)) + "." + std::string(to_string(style.weight));
}

inline std::string glyph_id_for(std::string_view vegetable, IconStyle style) {
    for (std::size_t i = 0; i < kVegetables.size(); ++i)
        if (kVegetables[i] == vegetable) return glyph_id(kGlyphBases[i], style);
    fail(ErrorCode::UnknownGlyph, "no glyph for category '" + std::string(vegetable) + "'");
}

/// Icon artwork in a unit box centred on the origin (coordinates within
/// [-0.5, 0.5], y down). Each part is an even-odd filled polygon; parts are
/// unioned when drawn.
struct IconGlyph {
    std::string glyph_id;
    std::string vegetable;
    IconStyle style;
    std::vector<Polygon> parts;

    std::string outline_path() const {
        std::string d;
        for (const auto& p : parts) {
            if (!d.empty()) d += ' ';
            d += svg::path_data(p);
        }
        return d;
    }
};

namespace detail {

/// Base element of the artwork: an ellipse or a free polygon, plus the detail
/// marks that sit inside it.
struct GlyphPiece {
    Contour outer;
    Contour inner;  // outline variant hole
    std::vector<Contour> details;
};

inline Contour ellipse(double cx, double cy, double rx, double ry, double rot_deg = 0.0, int n = 28) {
    Contour c;
    c.reserve(n);
    const double r = deg_to_rad(rot_deg);
    const double cs = std::cos(r), sn = std::sin(r);
    for (int k = 0; k < n; ++k) {
        const double t = 2.0 * std::numbers::pi * k / n;
        const double x = rx * std::cos(t), y = ry * std::sin(t);
        c.push_back({cx + x * cs - y * sn, cy + x * sn + y * cs});
    }
    return c;
}

inline Contour scaled_about(const Contour& c, Vec2 origin, double sx, double sy) {
    Contour out;
    out.reserve(c.size());
    for (auto v : c) out.push_back({origin.x + (v.x - origin.x) * sx, origin.y + (v.y - origin.y) * sy});
    return out;
}

inline GlyphPiece ellipse_piece(double cx, double cy, double rx, double ry, double rot, double stroke) {
    return {ellipse(cx, cy, rx, ry, rot), ellipse(cx, cy, rx - stroke, ry - stroke, rot), {}};
}

inline GlyphPiece polygon_piece(Contour outer, double stroke) {
    const Vec2 c = contour_centroid(outer);
    const Box b = bounds(Polygon{{outer}});
    const double sx = std::max(0.3, 1.0 - 2.0 * stroke / b.width());
    const double sy = std::max(0.3, 1.0 - 2.0 * stroke / b.height());
    Contour inner = scaled_about(outer, c, sx, sy);
    return {std::move(outer), std::move(inner), {}};
}

inline Contour bar(double x0, double y0, double x1, double y1, double half_width) {
    const Vec2 d{x1 - x0, y1 - y0};
    const double len = d.length();
    const Vec2 n{-d.y / len * half_width, d.x / len * half_width};
    return {{x0 + n.x, y0 + n.y}, {x1 + n.x, y1 + n.y}, {x1 - n.x, y1 - n.y}, {x0 - n.x, y0 - n.y}};
}

inline std::vector<GlyphPiece> vegetable_pieces(std::string_view base) {
    constexpr double s = 0.055;  // outline stroke in unit-box units
    std::vector<GlyphPiece> pieces;
    if (base == "carrot") {
        Contour body;
        for (int k = 0; k <= 12; ++k) {
            const double t = k / 12.0;
            body.push_back({0.19 * (1.0 - t) * (1.0 - 0.25 * t), -0.2 + 0.68 * t});
        }
        for (int k = 12; k >= 0; --k) {
            const double t = k / 12.0;
            body.push_back({-0.19 * (1.0 - t) * (1.0 - 0.25 * t), -0.2 + 0.68 * t});
        }
        auto p = polygon_piece(body, s);
        p.details = {bar(-0.12, -0.06, -0.02, -0.04, 0.018), bar(0.03, 0.08, 0.1, 0.09, 0.016),
                     bar(-0.07, 0.2, -0.01, 0.21, 0.014)};
        pieces.push_back(std::move(p));
        pieces.push_back(ellipse_piece(-0.1, -0.34, 0.05, 0.14, -25, s * 0.7));
        pieces.push_back(ellipse_piece(0.0, -0.36, 0.05, 0.14, 0, s * 0.7));
        pieces.push_back(ellipse_piece(0.1, -0.34, 0.05, 0.14, 25, s * 0.7));
    } else if (base == "celery") {
        for (double x : {-0.15, 0.0, 0.15}) {
            auto p = ellipse_piece(x, 0.12, 0.07, 0.34, 0, s * 0.8);
            p.details = {bar(x, -0.08, x, 0.32, 0.012)};
            pieces.push_back(std::move(p));
        }
        pieces.push_back(ellipse_piece(-0.16, -0.33, 0.11, 0.09, -20, s * 0.8));
        pieces.push_back(ellipse_piece(0.0, -0.38, 0.11, 0.09, 0, s * 0.8));
        pieces.push_back(ellipse_piece(0.16, -0.33, 0.11, 0.09, 20, s * 0.8));
    } else if (base == "corn") {
        auto cob = ellipse_piece(0.0, -0.05, 0.16, 0.36, 0, s);
        for (int row = 0; row < 5; ++row)
            for (int col = -1; col <= 1; ++col)
                cob.details.push_back(ellipse(col * 0.07, -0.25 + row * 0.09, 0.025, 0.03, 0, 12));
        pieces.push_back(std::move(cob));
        pieces.push_back(polygon_piece({{-0.02, 0.46}, {-0.3, 0.0}, {-0.22, -0.05}, {-0.07, 0.22}}, s * 0.8));
        pieces.push_back(polygon_piece({{0.02, 0.46}, {0.3, 0.0}, {0.22, -0.05}, {0.07, 0.22}}, s * 0.8));
    } else if (base == "eggplant") {
        auto body = ellipse_piece(0.05, 0.1, 0.22, 0.36, -25, s);
        body.details = {ellipse(-0.02, 0.12, 0.035, 0.14, -25, 14)};
        pieces.push_back(std::move(body));
        pieces.push_back(polygon_piece(
            {{-0.24, -0.36}, {-0.1, -0.3}, {0.0, -0.42}, {0.05, -0.26}, {0.18, -0.2}, {0.0, -0.16}, {-0.14, -0.2}}, s * 0.7));
    } else if (base == "mushroom") {
        Contour cap;
        for (int k = 0; k <= 20; ++k) {
            const double t = std::numbers::pi * (1.0 + k / 20.0);
            cap.push_back({0.44 * std::cos(t), 0.02 + 0.36 * std::sin(t)});
        }
        auto p = polygon_piece(cap, s);
        p.details = {ellipse(-0.2, -0.08, 0.05, 0.04, 0, 12), ellipse(0.05, -0.2, 0.06, 0.045, 0, 12),
                     ellipse(0.24, -0.06, 0.045, 0.035, 0, 12)};
        pieces.push_back(std::move(p));
        pieces.push_back(polygon_piece({{-0.12, 0.04}, {0.12, 0.04}, {0.14, 0.44}, {-0.14, 0.44}}, s));
    } else if (base == "olive") {
        auto a = ellipse_piece(-0.16, 0.14, 0.15, 0.22, -20, s);
        a.details = {ellipse(-0.15, 0.04, 0.05, 0.04, -20, 12)};
        auto b = ellipse_piece(0.18, 0.1, 0.15, 0.22, 20, s);
        b.details = {ellipse(0.17, 0.0, 0.05, 0.04, 20, 12)};
        pieces.push_back(std::move(a));
        pieces.push_back(std::move(b));
        pieces.push_back(ellipse_piece(0.02, -0.33, 0.16, 0.06, -15, s * 0.6));
    } else if (base == "tomato") {
        auto body = ellipse_piece(0.0, 0.08, 0.42, 0.36, 0, s);
        body.details = {ellipse(-0.2, 0.0, 0.06, 0.1, 30, 14)};
        pieces.push_back(std::move(body));
        Contour calyx;
        for (int k = 0; k < 10; ++k) {
            const double t = 2.0 * std::numbers::pi * k / 10.0 - std::numbers::pi / 2.0;
            const double r = (k % 2 == 0) ? 0.2 : 0.07;
            calyx.push_back({r * std::cos(t), -0.26 + 0.6 * r * std::sin(t)});
        }
        pieces.push_back(polygon_piece(calyx, s * 0.6));
    } else {
        fail(ErrorCode::UnknownGlyph, "unknown glyph base '" + std::string(base) + "'");
    }
    return pieces;
}

inline std::vector<Polygon> style_parts(const std::vector<GlyphPiece>& pieces, IconStyle style) {
    std::vector<Polygon> parts;
    const bool detailed = style.detail == IconDetail::Detailed;
    for (const auto& piece : pieces) {
        if (style.weight == IconWeight::Filled) {
            Polygon p{{piece.outer}};
            if (detailed)
                for (const auto& d : piece.details) p.contours.push_back(d);
            parts.push_back(std::move(p));
        } else {
            parts.push_back(Polygon{{piece.outer, piece.inner}});
            if (detailed)
                for (const auto& d : piece.details) parts.push_back(Polygon{{d}});
        }
    }
    return parts;
}

} // namespace detail

/// Registry of icon artwork keyed by glyph id. Immutable once built.
class GlyphRegistry {
public:
    GlyphRegistry() = default;

    /// The 28 shipped glyphs (7 vegetables × 4 styles).
    static const GlyphRegistry& builtin() {
        static const GlyphRegistry registry = [] {
            GlyphRegistry r;
            for (std::size_t i = 0; i < kGlyphBases.size(); ++i) {
                const auto pieces = detail::vegetable_pieces(kGlyphBases[i]);
                for (const auto style : kIconStyles) {
                    IconGlyph g;
                    g.glyph_id = glyph_id(kGlyphBases[i], style);
                    g.vegetable = std::string(kVegetables[i]);
                    g.style = style;
                    g.parts = detail::style_parts(pieces, style);
                    r.glyphs_.emplace(g.glyph_id, std::move(g));
                }
            }
            return r;
        }();
        return registry;
    }

    const IconGlyph* find(std::string_view id) const {
        const auto it = glyphs_.find(std::string(id));
        return it == glyphs_.end() ? nullptr : &it->second;
    }

    const IconGlyph& at(std::string_view id) const {
        if (const auto* g = find(id)) return *g;
        fail(ErrorCode::UnknownGlyph, "glyph '" + std::string(id) + "' is not registered");
    }

    bool contains(std::string_view id) const { return find(id) != nullptr; }
    std::size_t size() const { return glyphs_.size(); }
    const std::map<std::string, IconGlyph>& all() const { return glyphs_; }

    void add(IconGlyph glyph) { glyphs_.insert_or_assign(glyph.glyph_id, std::move(glyph)); }

    /// Standalone SVG file for one glyph (unit box viewBox, one path per part).
    static std::string to_svg_file(const IconGlyph& g) {
        std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"-0.5 -0.5 1 1\" data-glyph-id=\"" +
                          svg::escape(g.glyph_id) + "\" data-vegetable=\"" + svg::escape(g.vegetable) +
                          "\" data-style=\"" + std::string(to_string(g.style.detail)) + "." +
                          std::string(to_string(g.style.weight)) + "\">\n";
        for (const auto& part : g.parts) out += "  <path fill-rule=\"evenodd\" d=\"" + svg::path_data(part) + "\"/>\n";
        out += "</svg>\n";
        return out;
    }

    static IconGlyph from_svg_file(std::string_view text) {
        auto attr = [&](std::string_view from, std::string_view name, std::size_t& pos) -> std::string {
            const std::string key = std::string(name) + "=\"";
            const auto at = from.find(key, pos);
            if (at == std::string_view::npos) fail(ErrorCode::ParseError, "glyph file missing attribute " + std::string(name));
            const auto start = at + key.size();
            const auto end = from.find('"', start);
            pos = end;
            return std::string(from.substr(start, end - start));
        };
        IconGlyph g;
        std::size_t pos = 0;
        g.glyph_id = attr(text, "data-glyph-id", pos);
        g.vegetable = attr(text, "data-vegetable", pos);
        const std::string style = attr(text, "data-style", pos);
        g.style.detail = style.starts_with("detailed") ? IconDetail::Detailed : IconDetail::Simplified;
        g.style.weight = style.ends_with("outline") ? IconWeight::Outline : IconWeight::Filled;
        while (true) {
            const auto at = text.find("<path", pos);
            if (at == std::string_view::npos) break;
            pos = at;
            g.parts.push_back(svg::parse_path_data(attr(text, "d", pos)));
        }
        return g;
    }

    static GlyphRegistry load_directory(const std::filesystem::path& dir) {
        GlyphRegistry r;
        if (!std::filesystem::is_directory(dir)) fail(ErrorCode::IoError, "glyph directory not found: " + dir.string());
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (entry.path().extension() != ".svg") continue;
            std::ifstream in(entry.path());
            std::stringstream ss;
            ss << in.rdbuf();
            r.add(from_svg_file(ss.str()));
        }
        return r;
    }

private:
    std::map<std::string, IconGlyph> glyphs_;
};

} // namespace bwtex
