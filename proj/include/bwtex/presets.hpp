#pragma once

// Default texture sets, icon sets, the default dataset, the synthetic region
// map, and chart templates that approximate the study's winning designs.
// The in-code definitions are the source for the shipped assets/ tree.

#include "bwtex/chart.hpp"
#include "bwtex/glyphs.hpp"
#include "bwtex/json.hpp"
#include "bwtex/texture.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#ifndef BWTEX_DEFAULT_ASSETS_DIR
#define BWTEX_DEFAULT_ASSETS_DIR "assets"
#endif

namespace bwtex {

enum class PresetKind { Geometric, Iconic };

inline std::string_view to_string(PresetKind k) { return k == PresetKind::Geometric ? "geometric" : "iconic"; }

struct PresetSet {
    std::string id;
    PresetKind kind = PresetKind::Geometric;
    std::vector<TextureSpec> textures;

    bool operator==(const PresetSet&) const = default;
};

struct WinnerPreset {
    std::string id;
    ChartSpec chart;

    bool operator==(const WinnerPreset&) const = default;
};

inline constexpr double kLightGray = 0.83;
inline constexpr int kBertinSetCount = 5;

namespace presets_detail {

inline TextureSpec line(double density, double size, double orientation = 0.0) {
    TextureSpec s;
    s.primitive = LinePrimitive{};
    s.density = density;
    s.size = size;
    s.orientation_deg = orientation;
    return s;
}

inline TextureSpec grid(double density, double size, double orientation = 0.0, double crossing = 90.0) {
    TextureSpec s = line(density, size, orientation);
    s.primitive = GridPrimitive{crossing};
    return s;
}

inline TextureSpec dot(double density, double radius, double orientation = 0.0, bool filled = true,
                       Background bg = Background::White) {
    TextureSpec s = line(density, radius, orientation);
    s.primitive = DotPrimitive{filled};
    s.background = bg;
    return s;
}

inline TextureSpec solid_black() { return line(1, 100); }

inline TextureSpec icon(std::size_t vegetable, IconStyle style, double density, double size, double rotation = 0.0) {
    TextureSpec s;
    s.primitive = IconPrimitive{std::string(kGlyphBases[vegetable]), style};
    s.density = density;
    s.size = size;
    s.primitive_rotation_deg = rotation;
    return s;
}

inline std::vector<PresetSet> bertin_sets() {
    return {
        {"bertin-1", PresetKind::Geometric,
         {line(4, 1.5, 45), line(8, 1.5, 45), line(16, 1.5, 45), grid(6, 1), grid(12, 1), dot(10, 1.5), solid_black()}},
        {"bertin-2", PresetKind::Geometric,
         {line(8, 2, 0), line(8, 2, 30), line(8, 2, 60), line(8, 2, 90), line(8, 2, 120), line(8, 2, 150),
          solid_black()}},
        {"bertin-3", PresetKind::Geometric,
         {dot(3, 4), dot(6, 2.5), dot(12, 1.5), dot(24, 0.8), dot(6, 3.5, 45, false), dot(1.5, 5, 0, true, Background::Black),
          solid_black()}},
        {"bertin-4", PresetKind::Geometric,
         {grid(4, 1), grid(8, 1), grid(16, 0.6), line(3, 4, 0), line(6, 1.5, 90), dot(5, 2.5), solid_black()}},
        {"bertin-5", PresetKind::Geometric,
         {line(6, 2, 45), line(6, 2, 135), grid(6, 1.5), dot(5, 2), dot(5, 3, 45, false),
          dot(10, 1.5, 0, true, Background::Black), solid_black()}},
    };
}

inline std::string icon_set_id(IconStyle style) {
    return "icons-" + std::string(to_string(style.detail)) + "-" + std::string(to_string(style.weight));
}

inline std::vector<PresetSet> icon_sets() {
    std::vector<PresetSet> out;
    for (const auto style : kIconStyles) {
        PresetSet set{icon_set_id(style), PresetKind::Iconic, {}};
        for (std::size_t i = 0; i < kVegetables.size(); ++i) set.textures.push_back(icon(i, style, 4, 18));
        out.push_back(std::move(set));
    }
    return out;
}

/// Seven regions tiling a 300 × 200 rectangle; neighbours share edges exactly.
inline RegionMap vegetable_map() {
    const Vec2 A{0, 0}, B{110, 0}, C{210, 0}, D{300, 0}, E{0, 90}, F{100, 80}, G{200, 70}, H{300, 100}, I{0, 200},
        J{130, 200}, K{230, 200}, L{300, 200}, M{150, 140};
    return RegionMap{{
        {"carrots", {{A, B, F, E}}},
        {"celery", {{B, C, G, F}}},
        {"corn", {{C, D, H, G}}},
        {"eggplant", {{E, F, M, J, I}}},
        {"mushrooms", {{F, G, M}}},
        {"olives", {{G, H, L, K, M}}},
        {"tomatoes", {{M, K, J}}},
    }};
}

inline Dataset default_values() {
    Dataset d;
    const std::array<double, 7> values{14, 83, 84, 30, 35, 21, 41};
    for (std::size_t i = 0; i < kVegetables.size(); ++i) d.values[std::string(kVegetables[i])] = values[i];
    return d;
}

} // namespace presets_detail

/// Chart categories for the seven vegetables filled from `set`, in set order.
inline std::vector<Category> categories_for(const PresetSet& set) {
    std::vector<Category> out;
    for (std::size_t i = 0; i < kVegetables.size() && i < set.textures.size(); ++i)
        out.push_back({std::string(kVegetables[i]), std::string(kGlyphBases[i]), set.textures[i]});
    return out;
}

inline std::vector<Category> unicolor_categories(double gray = kLightGray) {
    std::vector<Category> out;
    for (std::size_t i = 0; i < kVegetables.size(); ++i)
        out.push_back({std::string(kVegetables[i]), std::string(kGlyphBases[i]), Unicolor{gray}});
    return out;
}

class PresetLibrary {
public:
    std::vector<PresetSet> sets;
    std::vector<WinnerPreset> winners;
    Dataset default_dataset;
    RegionMap map;
    GlyphRegistry glyphs;

    /// Definitions compiled into the library.
    static const PresetLibrary& builtin() {
        static const PresetLibrary lib = [] {
            using namespace presets_detail;
            PresetLibrary l;
            l.sets = bertin_sets();
            for (auto& s : icon_sets()) l.sets.push_back(std::move(s));
            l.default_dataset = default_values();
            l.map = vegetable_map();
            l.glyphs = GlyphRegistry::builtin();
            l.winners = builtin_winners(l);
            return l;
        }();
        return lib;
    }

    const PresetSet* find_set(std::string_view id) const {
        for (const auto& s : sets)
            if (s.id == id) return &s;
        return nullptr;
    }

    const PresetSet& set(std::string_view id) const {
        if (const auto* s = find_set(id)) return *s;
        fail(ErrorCode::OutOfRange, "no preset set '" + std::string(id) + "'");
    }

    const PresetSet& bertin(int index) const {
        if (index < 1 || index > kBertinSetCount)
            fail(ErrorCode::OutOfRange, "Bertin set index must lie in 1.." + std::to_string(kBertinSetCount));
        return set("bertin-" + std::to_string(index));
    }

    const PresetSet& icon_set(IconStyle style) const { return set(presets_detail::icon_set_id(style)); }

    const WinnerPreset& winner(std::string_view id) const {
        for (const auto& w : winners)
            if (w.id == id) return w;
        fail(ErrorCode::OutOfRange, "no winner preset '" + std::string(id) + "'");
    }

    const WinnerPreset& winner(ChartKind chart, PresetKind fill) const {
        if (chart == ChartKind::Map) fail(ErrorCode::OutOfRange, "winner presets exist for bar and pie charts only");
        const char* id = chart == ChartKind::Bar ? (fill == PresetKind::Geometric ? "BG2-like" : "BI1-like")
                                                 : (fill == PresetKind::Geometric ? "PG1-like" : "PI1-like");
        return winner(id);
    }

    /// Chart of `kind` filled from the set with `set_id` (or "unicolor").
    ChartSpec chart_from_set(std::string_view set_id, ChartKind kind) const {
        ChartSpec c;
        c.kind = kind;
        c.categories = set_id == "unicolor" ? unicolor_categories() : categories_for(set(set_id));
        if (kind == ChartKind::Map) c.map_regions = map;
        return c;
    }

    /// Writes the assets tree: presets/, winners/, datasets/, maps/ as JSON and glyphs/ as SVG.
    void export_to(const std::filesystem::path& dir) const {
        namespace fs = std::filesystem;
        for (const char* sub : {"presets", "winners", "datasets", "maps", "glyphs"}) fs::create_directories(dir / sub);
        for (const auto& s : sets) write_json(dir / "presets" / (s.id + ".json"), preset_to_json(s));
        for (const auto& w : winners)
            write_json(dir / "winners" / (w.id + ".json"), {{"id", w.id}, {"chart", to_json(w.chart)}});
        write_json(dir / "datasets" / "default.json", to_json(default_dataset));
        write_json(dir / "maps" / "vegetables.json", to_json(map));
        for (const auto& [id, g] : glyphs.all()) write_text(dir / "glyphs" / (id + ".svg"), GlyphRegistry::to_svg_file(g));
    }

    static PresetLibrary load(const std::filesystem::path& dir) {
        namespace fs = std::filesystem;
        if (!fs::is_directory(dir)) fail(ErrorCode::IoError, "asset directory not found: " + dir.string());
        PresetLibrary l;
        l.glyphs = GlyphRegistry::load_directory(dir / "glyphs");
        for (const auto& path : sorted_json(dir / "presets")) l.sets.push_back(preset_from_json(read_json(path)));
        std::sort(l.sets.begin(), l.sets.end(), [](const PresetSet& a, const PresetSet& b) { return set_rank(a) < set_rank(b); });
        for (const auto& path : sorted_json(dir / "winners")) {
            const Json j = read_json(path);
            json_detail::reject_unknown(j, {"id", "chart"}, "winner");
            l.winners.push_back({json_detail::string(j, "id", "winner"), chart_from_json(json_detail::required(j, "chart", "winner"))});
        }
        l.default_dataset = dataset_from_json(read_json(dir / "datasets" / "default.json"));
        l.map = region_map_from_json(read_json(dir / "maps" / "vegetables.json"));
        return l;
    }

    static Json preset_to_json(const PresetSet& s) {
        Json textures = Json::array();
        for (const auto& t : s.textures) textures.push_back(bwtex::to_json(t));
        return {{"id", s.id}, {"kind", std::string(to_string(s.kind))}, {"textures", textures}};
    }

    static PresetSet preset_from_json(const Json& j) {
        using namespace json_detail;
        require_object(j, "preset");
        reject_unknown(j, {"id", "kind", "textures"}, "preset");
        PresetSet s;
        s.id = string(j, "id", "preset");
        const std::string kind = string(j, "kind", "preset");
        if (kind != "geometric" && kind != "iconic") fail(ErrorCode::ParseError, "preset.kind must be geometric|iconic");
        s.kind = kind == "geometric" ? PresetKind::Geometric : PresetKind::Iconic;
        const Json& ts = required(j, "textures", "preset");
        if (!ts.is_array() || ts.size() != kVegetables.size())
            fail(ErrorCode::ParseError, "preset '" + s.id + "' must list exactly 7 textures");
        for (const auto& t : ts) s.textures.push_back(texture_from_json(t));
        return s;
    }

    bool operator==(const PresetLibrary& o) const {
        if (sets != o.sets || winners != o.winners || default_dataset != o.default_dataset || map != o.map) return false;
        if (glyphs.size() != o.glyphs.size()) return false;
        for (const auto& [id, g] : glyphs.all()) {
            const auto* h = o.glyphs.find(id);
            if (!h || GlyphRegistry::to_svg_file(g) != GlyphRegistry::to_svg_file(*h))
                return false;
        }
        return true;
    }

private:
    static std::vector<WinnerPreset> builtin_winners(const PresetLibrary& l) {
        std::vector<WinnerPreset> out;

        ChartSpec bg2;
        bg2.kind = ChartKind::Bar;
        bg2.categories = categories_for(l.set("bertin-2"));
        out.push_back({"BG2-like", bg2});

        ChartSpec bi1;
        bi1.kind = ChartKind::Bar;
        PresetSet icons = l.icon_set({IconDetail::Simplified, IconWeight::Filled});
        for (auto& t : icons.textures) {
            t.density = 5;
            t.size = 14;
        }
        bi1.categories = categories_for(icons);
        out.push_back({"BI1-like", bi1});

        ChartSpec pg1;
        pg1.kind = ChartKind::Pie;
        pg1.categories = categories_for(l.set("bertin-5"));
        pg1.halo_width = 2;
        out.push_back({"PG1-like", pg1});

        ChartSpec pi1;
        pi1.kind = ChartKind::Pie;
        PresetSet big = l.icon_set({IconDetail::Detailed, IconWeight::Outline});
        for (std::size_t i = 0; i < big.textures.size(); ++i) {
            big.textures[i].density = 3.5;
            big.textures[i].size = 20;
            big.textures[i].primitive_rotation_deg = i % 2 ? 15 : 0;
        }
        pi1.categories = categories_for(big);
        pi1.halo_width = 1.5;
        out.push_back({"PI1-like", pi1});
        return out;
    }

    static int set_rank(const PresetSet& s) {
        const auto builtin_ids = [] {
            std::vector<std::string> ids;
            for (const auto& b : presets_detail::bertin_sets()) ids.push_back(b.id);
            for (const auto style : kIconStyles) ids.push_back(presets_detail::icon_set_id(style));
            return ids;
        }();
        const auto it = std::find(builtin_ids.begin(), builtin_ids.end(), s.id);
        return it == builtin_ids.end() ? static_cast<int>(builtin_ids.size()) : static_cast<int>(it - builtin_ids.begin());
    }

    static std::vector<std::filesystem::path> sorted_json(const std::filesystem::path& dir) {
        std::vector<std::filesystem::path> out;
        if (!std::filesystem::is_directory(dir)) fail(ErrorCode::IoError, "asset directory not found: " + dir.string());
        for (const auto& e : std::filesystem::directory_iterator(dir))
            if (e.path().extension() == ".json") out.push_back(e.path());
        std::sort(out.begin(), out.end());
        return out;
    }

    static Json read_json(const std::filesystem::path& path) {
        std::ifstream in(path);
        if (!in) fail(ErrorCode::IoError, "cannot read " + path.string());
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_json(ss.str());
    }

    static void write_text(const std::filesystem::path& path, const std::string& text) {
        std::ofstream out(path, std::ios::binary);
        if (!out) fail(ErrorCode::IoError, "cannot write " + path.string());
        out << text;
    }

    static void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }
};

/// Asset directory: $BWTEX_ASSETS when set, otherwise the source tree's assets/.
inline std::filesystem::path assets_dir() {
    if (const char* env = std::getenv("BWTEX_ASSETS"); env && *env) return env;
    return BWTEX_DEFAULT_ASSETS_DIR;
}

inline const PresetSet& load_bertin_set(int index) { return PresetLibrary::builtin().bertin(index); }
inline const Dataset& default_dataset() { return PresetLibrary::builtin().default_dataset; }
inline const WinnerPreset& winner_preset(ChartKind chart, PresetKind fill) {
    return PresetLibrary::builtin().winner(chart, fill);
}

} // namespace bwtex
