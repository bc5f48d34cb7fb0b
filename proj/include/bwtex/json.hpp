#pragma once

// JSON forms of the public value types. Unknown keys are rejected everywhere.

#include "bwtex/chart.hpp"
#include "bwtex/error.hpp"
#include "bwtex/texture.hpp"

#include <json.hpp>

#include <initializer_list>
#include <string>

namespace bwtex {

using Json = nlohmann::json;

namespace json_detail {

inline void require_object(const Json& j, std::string_view what) {
    if (!j.is_object()) fail(ErrorCode::ParseError, std::string(what) + " must be a JSON object");
}

inline void reject_unknown(const Json& j, std::initializer_list<std::string_view> allowed, std::string_view what) {
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (auto a : allowed) ok = ok || key == a;
        if (!ok) fail(ErrorCode::ParseError, "unknown key '" + key + "' in " + std::string(what));
    }
}

inline const Json& required(const Json& j, std::string_view key, std::string_view what) {
    const auto it = j.find(std::string(key));
    if (it == j.end()) fail(ErrorCode::ParseError, std::string(what) + " is missing '" + std::string(key) + "'");
    return *it;
}

inline double number(const Json& j, std::string_view key, std::string_view what) {
    const Json& v = required(j, key, what);
    if (!v.is_number()) fail(ErrorCode::ParseError, std::string(what) + "." + std::string(key) + " must be a number");
    return v.get<double>();
}

inline double number_or(const Json& j, std::string_view key, double fallback, std::string_view what) {
    return j.contains(std::string(key)) ? number(j, key, what) : fallback;
}

inline std::string string(const Json& j, std::string_view key, std::string_view what) {
    const Json& v = required(j, key, what);
    if (!v.is_string()) fail(ErrorCode::ParseError, std::string(what) + "." + std::string(key) + " must be a string");
    return v.get<std::string>();
}

} // namespace json_detail

inline Json to_json(const PrimitiveKind& kind) {
    return std::visit(
        [](const auto& p) -> Json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, DotPrimitive>) {
                return {{"kind", "dot"}, {"filled", p.filled}};
            } else if constexpr (std::is_same_v<T, LinePrimitive>) {
                return {{"kind", "line"}};
            } else if constexpr (std::is_same_v<T, GridPrimitive>) {
                return {{"kind", "grid"}, {"crossing_angle_deg", p.crossing_angle_deg}};
            } else {
                return {{"kind", "icon"},
                        {"glyph_id", p.glyph_id},
                        {"detail", std::string(to_string(p.style.detail))},
                        {"weight", std::string(to_string(p.style.weight))}};
            }
        },
        kind);
}

inline PrimitiveKind primitive_from_json(const Json& j) {
    using namespace json_detail;
    require_object(j, "primitive");
    const std::string kind = string(j, "kind", "primitive");
    if (kind == "dot") {
        reject_unknown(j, {"kind", "filled"}, "dot primitive");
        DotPrimitive d;
        if (j.contains("filled")) {
            if (!j["filled"].is_boolean()) fail(ErrorCode::ParseError, "dot.filled must be a boolean");
            d.filled = j["filled"].get<bool>();
        }
        return d;
    }
    if (kind == "line") {
        reject_unknown(j, {"kind"}, "line primitive");
        return LinePrimitive{};
    }
    if (kind == "grid") {
        reject_unknown(j, {"kind", "crossing_angle_deg"}, "grid primitive");
        return GridPrimitive{number_or(j, "crossing_angle_deg", 90.0, "grid")};
    }
    if (kind == "icon") {
        reject_unknown(j, {"kind", "glyph_id", "detail", "weight"}, "icon primitive");
        IconPrimitive icon;
        icon.glyph_id = string(j, "glyph_id", "icon");
        if (j.contains("detail")) {
            const auto d = string(j, "detail", "icon");
            if (d != "detailed" && d != "simplified") fail(ErrorCode::ParseError, "icon.detail must be detailed|simplified");
            icon.style.detail = d == "detailed" ? IconDetail::Detailed : IconDetail::Simplified;
        }
        if (j.contains("weight")) {
            const auto w = string(j, "weight", "icon");
            if (w != "outline" && w != "filled") fail(ErrorCode::ParseError, "icon.weight must be outline|filled");
            icon.style.weight = w == "outline" ? IconWeight::Outline : IconWeight::Filled;
        }
        return icon;
    }
    fail(ErrorCode::ParseError, "unknown primitive kind '" + kind + "'");
}

inline Json to_json(const TextureSpec& spec) {
    return {{"primitive", to_json(spec.primitive)},
            {"density", spec.density},
            {"size", spec.size},
            {"orientation_deg", spec.orientation_deg},
            {"primitive_rotation_deg", spec.primitive_rotation_deg},
            {"background", std::string(to_string(spec.background))},
            {"randomness", spec.randomness},
            {"phase", Json::array({spec.phase.x, spec.phase.y})},
            {"seed", spec.seed}};
}

/// Parses the external TextureSpec form. Omitted optional keys take defaults;
/// `primitive`, `density` and `size` are required.
inline TextureSpec texture_from_json(const Json& j) {
    using namespace json_detail;
    require_object(j, "texture");
    reject_unknown(j,
                   {"primitive", "density", "size", "orientation_deg", "primitive_rotation_deg", "background",
                    "randomness", "phase", "seed"},
                   "texture");
    TextureSpec s;
    s.primitive = primitive_from_json(required(j, "primitive", "texture"));
    s.density = number(j, "density", "texture");
    s.size = number(j, "size", "texture");
    s.orientation_deg = number_or(j, "orientation_deg", 0.0, "texture");
    s.primitive_rotation_deg = number_or(j, "primitive_rotation_deg", 0.0, "texture");
    s.randomness = number_or(j, "randomness", 0.0, "texture");
    if (j.contains("background")) {
        const auto bg = string(j, "background", "texture");
        if (bg != "white" && bg != "black") fail(ErrorCode::ParseError, "background must be white|black");
        s.background = bg == "white" ? Background::White : Background::Black;
    }
    if (j.contains("phase")) {
        const Json& p = j["phase"];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            fail(ErrorCode::ParseError, "phase must be [dx, dy]");
        s.phase = {p[0].get<double>(), p[1].get<double>()};
    }
    if (j.contains("seed")) {
        const Json& v = j["seed"];
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            fail(ErrorCode::ParseError, "seed must be a non-negative integer");
        s.seed = v.get<std::uint64_t>();
    }
    return s;
}

inline Json to_json(const LintReport& report) {
    Json findings = Json::array();
    for (const auto& f : report.findings)
        findings.push_back({{"pair", {f.first, f.second}},
                            {"rule_id", f.rule_id},
                            {"severity", std::string(to_string(f.severity))},
                            {"message", f.message}});
    return {{"findings", findings}};
}

namespace json_detail {

inline Json point(Vec2 p) { return Json::array({p.x, p.y}); }

inline Vec2 point_from(const Json& j, std::string_view what) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        fail(ErrorCode::ParseError, std::string(what) + " must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

template <typename E>
E enum_from(const Json& j, std::string_view key, std::initializer_list<E> values, std::string_view what) {
    const std::string s = string(j, key, what);
    for (E v : values)
        if (to_string(v) == s) return v;
    fail(ErrorCode::ParseError, std::string(what) + "." + std::string(key) + " has unknown value '" + s + "'");
}

} // namespace json_detail

inline Json to_json(const FillStyle& fill) {
    if (const auto* t = std::get_if<TextureSpec>(&fill)) return {{"texture", to_json(*t)}};
    return {{"unicolor", std::get<Unicolor>(fill).gray_level}};
}

inline FillStyle fill_from_json(const Json& j) {
    using namespace json_detail;
    require_object(j, "fill");
    reject_unknown(j, {"texture", "unicolor"}, "fill");
    if (j.size() != 1) fail(ErrorCode::ParseError, "fill must hold exactly one of texture|unicolor");
    if (j.contains("texture")) return texture_from_json(j["texture"]);
    return Unicolor{number(j, "unicolor", "fill")};
}

inline Json to_json(const RegionMap& map) {
    Json regions = Json::array();
    for (const auto& r : map.regions) {
        Json polys = Json::array();
        for (const auto& poly : r.polygons) {
            Json pts = Json::array();
            for (const auto& v : poly) pts.push_back(json_detail::point(v));
            polys.push_back(pts);
        }
        regions.push_back({{"category", r.category}, {"polygons", polys}});
    }
    return regions;
}

inline RegionMap region_map_from_json(const Json& j) {
    using namespace json_detail;
    if (!j.is_array()) fail(ErrorCode::ParseError, "map_regions must be an array");
    RegionMap map;
    for (const auto& r : j) {
        require_object(r, "region");
        reject_unknown(r, {"category", "polygons"}, "region");
        Region region{string(r, "category", "region"), {}};
        const Json& polys = required(r, "polygons", "region");
        if (!polys.is_array()) fail(ErrorCode::ParseError, "region.polygons must be an array");
        for (const auto& poly : polys) {
            if (!poly.is_array()) fail(ErrorCode::ParseError, "polygon must be an array of points");
            Contour c;
            for (const auto& p : poly) c.push_back(point_from(p, "polygon vertex"));
            region.polygons.push_back(std::move(c));
        }
        map.regions.push_back(std::move(region));
    }
    return map;
}

inline Json to_json(const ChartSpec& chart) {
    Json cats = Json::array();
    for (const auto& c : chart.categories)
        cats.push_back({{"name", c.name}, {"glyph_id", c.glyph_id}, {"fill", to_json(c.fill)}});
    Json j{{"kind", std::string(to_string(chart.kind))},
           {"categories", cats},
           {"outline_width", chart.outline_width},
           {"halo_width", chart.halo_width},
           {"legend", std::string(to_string(chart.legend))},
           {"canvas", Json::array({chart.width, chart.height})}};
    if (chart.map_regions) j["map_regions"] = to_json(*chart.map_regions);
    return j;
}

inline ChartSpec chart_from_json(const Json& j) {
    using namespace json_detail;
    require_object(j, "chart");
    reject_unknown(j, {"kind", "categories", "outline_width", "halo_width", "legend", "map_regions", "canvas"}, "chart");
    ChartSpec c;
    c.kind = enum_from(j, "kind", {ChartKind::Bar, ChartKind::Pie, ChartKind::Map}, "chart");
    const Json& cats = required(j, "categories", "chart");
    if (!cats.is_array()) fail(ErrorCode::ParseError, "chart.categories must be an array");
    for (const auto& cj : cats) {
        require_object(cj, "category");
        reject_unknown(cj, {"name", "glyph_id", "fill"}, "category");
        c.categories.push_back(
            {string(cj, "name", "category"), string(cj, "glyph_id", "category"), fill_from_json(required(cj, "fill", "category"))});
    }
    c.outline_width = number_or(j, "outline_width", c.outline_width, "chart");
    c.halo_width = number_or(j, "halo_width", c.halo_width, "chart");
    if (j.contains("legend"))
        c.legend = enum_from(j, "legend", {LegendPlacement::None, LegendPlacement::Right, LegendPlacement::Bottom}, "chart");
    if (j.contains("canvas")) {
        const Vec2 size = point_from(j["canvas"], "chart.canvas");
        c.width = size.x;
        c.height = size.y;
    }
    if (j.contains("map_regions")) c.map_regions = region_map_from_json(j["map_regions"]);
    return c;
}

/// Datasets are flat objects of category name to value.
inline Json to_json(const Dataset& data) {
    Json j = Json::object();
    for (const auto& [k, v] : data.values) j[k] = v;
    return j;
}

inline Dataset dataset_from_json(const Json& j) {
    json_detail::require_object(j, "dataset");
    Dataset d;
    for (const auto& [k, v] : j.items()) {
        if (!v.is_number()) fail(ErrorCode::ParseError, "dataset value for '" + k + "' must be a number");
        d.values[k] = v.get<double>();
    }
    return d;
}

inline Json parse_json(std::string_view text) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        fail(ErrorCode::ParseError, e.what());
    }
}

} // namespace bwtex
