#pragma once

#include "bwtex/error.hpp"
#include "bwtex/geometry.hpp"
#include "bwtex/scene.hpp"
#include "bwtex/texture.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace bwtex {

/// Flat fill; 0 is black and 1 is white.
struct Unicolor {
    double gray_level = 0.83;
    bool operator==(const Unicolor&) const = default;
};

using FillStyle = std::variant<TextureSpec, Unicolor>;

struct Category {
    std::string name;
    std::string glyph_id;
    FillStyle fill;

    bool operator==(const Category&) const = default;
};

enum class ChartKind { Bar, Pie, Map };
enum class LegendPlacement { None, Right, Bottom };

inline std::string_view to_string(ChartKind k) {
    switch (k) {
    case ChartKind::Bar: return "bar";
    case ChartKind::Pie: return "pie";
    case ChartKind::Map: return "map";
    }
    return "bar";
}

inline std::string_view to_string(LegendPlacement l) {
    switch (l) {
    case LegendPlacement::None: return "none";
    case LegendPlacement::Right: return "right";
    case LegendPlacement::Bottom: return "bottom";
    }
    return "none";
}

struct Region {
    std::string category;
    std::vector<Contour> polygons;

    bool operator==(const Region&) const = default;
};

/// Pre-projected regions; borders are shared by coincident edges.
struct RegionMap {
    std::vector<Region> regions;

    bool operator==(const RegionMap&) const = default;
};

struct ChartSpec {
    ChartKind kind = ChartKind::Bar;
    std::vector<Category> categories;
    double outline_width = 1.0;
    double halo_width = 0.0;
    LegendPlacement legend = LegendPlacement::Right;
    std::optional<RegionMap> map_regions;
    double width = 640.0;
    double height = 400.0;

    bool operator==(const ChartSpec&) const = default;

    const Category* find(std::string_view name) const {
        for (const auto& c : categories)
            if (c.name == name) return &c;
        return nullptr;
    }
};

struct Dataset {
    std::map<std::string, double> values;

    bool operator==(const Dataset&) const = default;
};

struct RenderOptions {
    std::optional<std::string> selected;
    const GlyphRegistry* glyphs = &GlyphRegistry::builtin();
};

// --- validation ---------------------------------------------------------------

inline void validate_chart(const ChartSpec& chart, const GlyphRegistry& glyphs = GlyphRegistry::builtin()) {
    if (chart.categories.empty()) fail(ErrorCode::InvalidSpec, "chart needs at least one category");
    if (!(chart.outline_width >= 0.0) || !(chart.halo_width >= 0.0))
        fail(ErrorCode::InvalidSpec, "outline and halo widths must be non-negative");
    if (chart.kind == ChartKind::Bar && chart.halo_width != 0.0)
        fail(ErrorCode::InvalidSpec, "bar charts have no white halo");
    if (!(chart.width > 0.0) || !(chart.height > 0.0)) fail(ErrorCode::InvalidSpec, "canvas must be positive");
    std::set<std::string> names;
    for (const auto& c : chart.categories) {
        if (c.name.empty()) fail(ErrorCode::InvalidSpec, "category names must be non-empty");
        if (!names.insert(c.name).second) fail(ErrorCode::InvalidSpec, "duplicate category '" + c.name + "'");
        if (const auto* t = std::get_if<TextureSpec>(&c.fill)) {
            validate(*t, glyphs);
            if (const auto* icon = std::get_if<IconPrimitive>(&t->primitive); icon && icon->glyph_id != c.glyph_id)
                fail(ErrorCode::InvalidSpec, "category '" + c.name + "' uses glyph '" + icon->glyph_id +
                                                 "' instead of its own '" + c.glyph_id + "'");
        } else {
            const double g = std::get<Unicolor>(c.fill).gray_level;
            if (!(g >= 0.0 && g <= 1.0)) fail(ErrorCode::InvalidSpec, "gray level must lie in [0, 1]");
        }
    }
    if (chart.kind == ChartKind::Map) {
        if (!chart.map_regions) fail(ErrorCode::MissingRegions, "map charts need map_regions");
        std::map<std::string, int> seen;
        for (const auto& r : chart.map_regions->regions) {
            if (!names.contains(r.category)) fail(ErrorCode::InvalidSpec, "region for unknown category '" + r.category + "'");
            if (++seen[r.category] > 1) fail(ErrorCode::InvalidSpec, "category '" + r.category + "' has two regions");
            if (r.polygons.empty()) fail(ErrorCode::InvalidSpec, "region '" + r.category + "' has no polygon");
            for (const auto& poly : r.polygons)
                if (!is_simple(poly)) fail(ErrorCode::InvalidSpec, "region '" + r.category + "' is not simple");
        }
        for (const auto& c : chart.categories)
            if (!seen.contains(c.name)) fail(ErrorCode::MissingRegions, "no region for category '" + c.name + "'");
    }
}

inline void validate_dataset(const ChartSpec& chart, const Dataset& data) {
    if (data.values.size() != chart.categories.size())
        fail(ErrorCode::MismatchedDataset, "dataset has " + std::to_string(data.values.size()) + " values for " +
                                               std::to_string(chart.categories.size()) + " categories");
    double sum = 0.0;
    for (const auto& c : chart.categories) {
        const auto it = data.values.find(c.name);
        if (it == data.values.end()) fail(ErrorCode::MismatchedDataset, "no value for category '" + c.name + "'");
        if (!std::isfinite(it->second) || it->second < 0.0)
            fail(ErrorCode::MismatchedDataset, "value for '" + c.name + "' must be a non-negative number");
        sum += it->second;
    }
    if (chart.kind == ChartKind::Pie && !(sum > 0.0)) fail(ErrorCode::EmptyPie, "pie values sum to zero");
}

// --- halo -----------------------------------------------------------------------

enum class HaloLayer { Outside, Texture, Halo, Outline };

/// Paint order for one chart mark: texture inset by halo + outline/2, a white
/// band of `halo_width`, then the outline stroke centred on the border.
struct HaloStack {
    Shape shape;
    double texture_inset = 0.0;
    double halo_width = 0.0;
    double outline_width = 0.0;
    bool degenerate = false;

    HaloLayer layer_at(Vec2 p) const {
        const double d = boundary_distance(shape, p);
        if (outline_width > 0.0 && d <= outline_width / 2.0) return HaloLayer::Outline;
        if (!contains(shape, p)) return HaloLayer::Outside;
        if (degenerate || d <= texture_inset) return halo_width > 0.0 || degenerate ? HaloLayer::Halo : HaloLayer::Texture;
        return HaloLayer::Texture;
    }
};

/// Builds the layer stack for `shape`. When the inset swallows the shape the
/// stack is flagged degenerate and the mark renders white with its outline.
inline HaloStack apply_halo(const Shape& shape, double halo_width, double outline_width,
                            std::vector<std::string>* warnings = nullptr) {
    if (!(halo_width >= 0.0) || !(outline_width >= 0.0))
        fail(ErrorCode::InvalidSpec, "halo and outline widths must be non-negative");
    HaloStack stack{shape, halo_width + outline_width / 2.0, halo_width, outline_width, false};
    if (halo_width > 0.0 && stack.texture_inset >= inradius(shape)) {
        stack.degenerate = true;
        if (warnings) warnings->push_back("DegenerateInset: halo inset " + svg::num(stack.texture_inset) +
                                          " exceeds the shape's inradius; texture omitted");
    }
    return stack;
}

// --- layout & rendering ---------------------------------------------------------

inline std::string slug(std::string_view name) {
    std::string out;
    for (char ch : name) {
        if ((ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9')) out += ch;
        else if (ch >= 'A' && ch <= 'Z') out += static_cast<char>(ch - 'A' + 'a');
        else out += '-';
    }
    return out;
}

inline std::string pattern_id(std::size_t index, std::string_view name) {
    return "tex-" + std::to_string(index) + "-" + slug(name);
}

inline constexpr double kMargin = 20.0;
inline constexpr double kFontSize = 12.0;
inline constexpr double kSwatchSize = 24.0;
inline constexpr double kLegendGap = 8.0;
inline constexpr double kBarGapFraction = 0.4;
inline constexpr double kSelectionRadius = 4.0;
inline const SolidPaint kSelectionPaint{"#1e6fd9", 105};

inline double text_width(std::string_view text, double font_size = kFontSize) {
    return 0.6 * font_size * static_cast<double>(text.size());
}

/// Value-axis maximum: 100 for the 0–100 study scale, otherwise the next multiple of 10.
inline double value_axis_max(const Dataset& data) {
    double mx = 0.0;
    for (const auto& [_, v] : data.values) mx = std::max(mx, v);
    return mx <= 100.0 ? 100.0 : std::ceil(mx / 10.0) * 10.0;
}

struct LegendEntry {
    std::string name;
    Paint paint;
};

/// Appends legend rows (swatch + label) at `origin`, one entry per category in order.
inline Box append_legend(Scene& scene, const std::vector<LegendEntry>& entries, double swatch_size, Vec2 origin,
                         bool horizontal, double max_extent, const std::optional<std::string>& selected = {}) {
    Box used;
    scene.ops.push_back(GroupOp{"legend", true});
    Vec2 cursor = origin;
    for (const auto& e : entries) {
        const double entry_w = swatch_size + kLegendGap + text_width(e.name) + 2.0 * kLegendGap + 2 * kSelectionRadius;
        if (horizontal && cursor.x > origin.x && cursor.x + entry_w > origin.x + max_extent) {
            cursor = {origin.x, cursor.y + swatch_size + kLegendGap};
        }
        const Polygon swatch = rectangle(cursor.x, cursor.y, swatch_size, swatch_size);
        scene.ops.push_back(FillOp{swatch, e.paint, "swatch-" + slug(e.name)});
        scene.ops.push_back(StrokeOp{swatch, 1.0, black_paint()});
        const Vec2 label{cursor.x + swatch_size + kLegendGap, cursor.y + swatch_size / 2.0 + kFontSize * 0.35};
        scene.ops.push_back(TextOp{label, e.name, kFontSize, TextAnchor::Start});
        used.expand(bounds(swatch).inflated(0.5));
        used.expand(Box{{label.x, cursor.y}, {label.x + text_width(e.name), cursor.y + swatch_size}});
        if (selected && *selected == e.name) {
            const Vec2 dot{label.x + text_width(e.name) + kLegendGap, cursor.y + swatch_size / 2.0};
            scene.ops.push_back(FillOp{Circle{dot, kSelectionRadius}, kSelectionPaint, "selection-legend"});
            used.expand(bounds(Circle{dot, kSelectionRadius}));
        }
        if (horizontal) cursor.x += entry_w;
        else cursor.y += swatch_size + kLegendGap;
    }
    scene.ops.push_back(GroupOp{"legend", false});
    return used;
}

namespace detail {

struct ChartFrame {
    Box plot;
    Vec2 legend_origin;
    bool legend_horizontal = false;
    double legend_extent = 0.0;
};

inline ChartFrame frame_for(const ChartSpec& chart) {
    ChartFrame f;
    double label_w = 0.0;
    for (const auto& c : chart.categories) label_w = std::max(label_w, text_width(c.name));
    f.plot = Box{{kMargin, kMargin}, {chart.width - kMargin, chart.height - kMargin}};
    if (chart.legend == LegendPlacement::Right) {
        const double legend_w = kSwatchSize + kLegendGap + label_w + 2 * kLegendGap + 2 * kSelectionRadius;
        f.plot.max.x -= legend_w + kMargin;
        f.legend_origin = {f.plot.max.x + kMargin, kMargin};
        f.legend_extent = legend_w;
    } else if (chart.legend == LegendPlacement::Bottom) {
        double row_w = 0.0;
        for (const auto& c : chart.categories)
            row_w += kSwatchSize + kLegendGap + text_width(c.name) + 2 * kLegendGap + 2 * kSelectionRadius;
        const double avail = chart.width - 2 * kMargin;
        const int rows = std::max(1, static_cast<int>(std::ceil(row_w / avail)));
        f.plot.max.y -= rows * (kSwatchSize + kLegendGap) + kMargin;
        f.legend_origin = {kMargin, f.plot.max.y + kMargin};
        f.legend_horizontal = true;
        f.legend_extent = avail;
    }
    return f;
}

inline Paint category_paint(Scene& scene, std::size_t index, const Category& c, const GlyphRegistry& glyphs) {
    if (const auto* t = std::get_if<TextureSpec>(&c.fill)) {
        scene.patterns.push_back({pattern_id(index, c.name), build_tile(*t, glyphs)});
        return PatternPaint{scene.patterns.size() - 1};
    }
    return gray_paint(std::get<Unicolor>(c.fill).gray_level);
}

inline void bar_marks(Scene& scene, const ChartSpec& chart, const Dataset& data, const Box& plot,
                      const std::vector<Paint>& paints, const std::optional<std::string>& selected) {
    const double axis_space = 36.0;
    const double label_space = 24.0;
    const Box area{{plot.min.x + axis_space, plot.min.y + 8.0}, {plot.max.x, plot.max.y - label_space}};
    const std::size_t n = chart.categories.size();
    const double bar_w = area.width() / (n + kBarGapFraction * (n + 1));
    const double gap = kBarGapFraction * bar_w;
    const double axis_max = value_axis_max(data);
    const double baseline = area.max.y;

    std::vector<Polygon> bars;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& c = chart.categories[k];
        const double h = data.values.at(c.name) / axis_max * area.height();
        const double x = area.min.x + gap + k * (bar_w + gap);
        bars.push_back(rectangle(x, baseline - h, bar_w, h));
        scene.ops.push_back(FillOp{bars.back(), paints[k], "mark-" + slug(c.name)});
    }
    if (chart.outline_width > 0.0)
        for (const auto& b : bars) scene.ops.push_back(StrokeOp{b, chart.outline_width, black_paint()});

    // Axis: vertical line, baseline, ticks every 10 with labels.
    const double axis_x = area.min.x;
    scene.ops.push_back(FillOp{rectangle(axis_x - 0.5, area.min.y, 1.0, area.height() + 0.5), black_paint(), ""});
    scene.ops.push_back(FillOp{rectangle(axis_x - 0.5, baseline - 0.5, area.width() + 0.5, 1.0), black_paint(), ""});
    for (double v = 0.0; v <= axis_max + 1e-9; v += 10.0) {
        const double y = baseline - v / axis_max * area.height();
        scene.ops.push_back(FillOp{rectangle(axis_x - 5.0, y - 0.5, 5.0, 1.0), black_paint(), ""});
        scene.ops.push_back(TextOp{{axis_x - 8.0, y + kFontSize * 0.35}, svg::num(v), kFontSize - 2, TextAnchor::End});
    }
    for (std::size_t k = 0; k < n; ++k) {
        const Box b = bounds(bars[k]);
        scene.ops.push_back(TextOp{{(b.min.x + b.max.x) / 2.0, baseline + 16.0}, chart.categories[k].name, kFontSize - 1,
                                   TextAnchor::Middle});
        if (selected && *selected == chart.categories[k].name)
            scene.ops.push_back(FillOp{Circle{{(b.min.x + b.max.x) / 2.0, b.min.y - 8.0 - chart.outline_width / 2.0},
                                              kSelectionRadius},
                                       kSelectionPaint, "selection-mark"});
    }
}

inline void draw_haloed(Scene& scene, const std::vector<HaloStack>& stacks, const std::vector<Paint>& paints,
                        const std::vector<std::string>& refs) {
    for (std::size_t k = 0; k < stacks.size(); ++k) {
        const Paint paint = stacks[k].degenerate ? Paint{white_paint()} : paints[k];
        scene.ops.push_back(FillOp{stacks[k].shape, paint, refs[k]});
    }
    for (const auto& s : stacks)
        if (s.halo_width > 0.0)
            scene.ops.push_back(StrokeOp{s.shape, 2.0 * s.halo_width + s.outline_width, white_paint()});
    for (const auto& s : stacks)
        if (s.outline_width > 0.0) scene.ops.push_back(StrokeOp{s.shape, s.outline_width, black_paint()});
}

inline void pie_marks(Scene& scene, const ChartSpec& chart, const Dataset& data, const Box& plot,
                      const std::vector<Paint>& paints, const std::optional<std::string>& selected) {
    const Vec2 center{std::round((plot.min.x + plot.max.x) / 2.0), std::round((plot.min.y + plot.max.y) / 2.0)};
    const double radius = std::max(1.0, std::min(plot.width(), plot.height()) / 2.0 - 24.0);
    double total = 0.0;
    for (const auto& c : chart.categories) total += data.values.at(c.name);

    std::vector<HaloStack> stacks;
    std::vector<Paint> kept;
    std::vector<std::string> refs;
    std::vector<std::pair<std::size_t, double>> mids;
    double cumulative = 0.0;
    for (std::size_t k = 0; k < chart.categories.size(); ++k) {
        const auto& c = chart.categories[k];
        const double v = data.values.at(c.name);
        const double start = 360.0 * cumulative / total;
        cumulative += v;
        const double sweep = 360.0 * v / total;
        if (sweep <= 0.0) continue;
        const Sector sector{center, radius, start, sweep};
        stacks.push_back(apply_halo(sector, chart.halo_width, chart.outline_width, &scene.warnings));
        kept.push_back(paints[k]);
        refs.push_back("mark-" + slug(c.name));
        mids.emplace_back(k, start + sweep / 2.0);
    }
    draw_haloed(scene, stacks, kept, refs);
    for (const auto& [k, mid] : mids) {
        const auto& name = chart.categories[k].name;
        const Vec2 at = sector_point(center, radius + 14.0, mid);
        const TextAnchor anchor = at.x < center.x - 1 ? TextAnchor::End : at.x > center.x + 1 ? TextAnchor::Start
                                                                                               : TextAnchor::Middle;
        scene.ops.push_back(TextOp{{at.x, at.y + kFontSize * 0.35}, name, kFontSize - 1, anchor});
        if (selected && *selected == name)
            scene.ops.push_back(
                FillOp{Circle{sector_point(center, radius * 0.55, mid), kSelectionRadius}, kSelectionPaint, "selection-mark"});
    }
}

inline void map_marks(Scene& scene, const ChartSpec& chart, const Dataset& data, const Box& plot,
                      const std::vector<Paint>& paints, const std::optional<std::string>& selected) {
    Box extent;
    for (const auto& r : chart.map_regions->regions)
        for (const auto& poly : r.polygons)
            for (const auto& v : poly) extent.expand(v);
    const double pad = chart.outline_width / 2.0 + 2.0;
    const double scale = std::min((plot.width() - 2 * pad) / extent.width(), (plot.height() - 2 * pad) / extent.height());
    const Vec2 offset{plot.min.x + pad + (plot.width() - 2 * pad - extent.width() * scale) / 2.0 - extent.min.x * scale,
                      plot.min.y + pad + (plot.height() - 2 * pad - extent.height() * scale) / 2.0 - extent.min.y * scale};
    const Affine fit = Affine::translate(offset.x, offset.y).then_after(Affine::scale(scale));

    std::vector<HaloStack> stacks;
    std::vector<Paint> ordered;
    std::vector<std::string> refs;
    std::vector<Vec2> label_at;
    for (std::size_t k = 0; k < chart.categories.size(); ++k) {
        const auto& c = chart.categories[k];
        const auto it = std::find_if(chart.map_regions->regions.begin(), chart.map_regions->regions.end(),
                                     [&](const Region& r) { return r.category == c.name; });
        Polygon poly;
        for (const auto& contour : it->polygons) poly.contours.push_back(transformed(Polygon{{contour}}, fit).contours[0]);
        label_at.push_back(contour_centroid(poly.contours.front()));
        stacks.push_back(apply_halo(poly, chart.halo_width, chart.outline_width, &scene.warnings));
        ordered.push_back(paints[k]);
        refs.push_back("mark-" + slug(c.name));
    }
    draw_haloed(scene, stacks, ordered, refs);
    for (std::size_t k = 0; k < chart.categories.size(); ++k) {
        const auto& name = chart.categories[k].name;
        scene.ops.push_back(TextOp{label_at[k], name + " " + svg::num(data.values.at(name)), kFontSize - 2,
                                   TextAnchor::Middle});
        if (selected && *selected == name)
            scene.ops.push_back(FillOp{Circle{label_at[k] + Vec2{0, 10}, kSelectionRadius}, kSelectionPaint, "selection-mark"});
    }
}

} // namespace detail

/// Lays out the chart and its legend as a drawing scene.
inline Scene build_chart_scene(const ChartSpec& chart, const Dataset& data, const RenderOptions& opts = {}) {
    const GlyphRegistry& glyphs = *opts.glyphs;
    validate_chart(chart, glyphs);
    validate_dataset(chart, data);
    if (opts.selected && !chart.find(*opts.selected))
        fail(ErrorCode::UnknownCategory, "selected category '" + *opts.selected + "' is not in the chart");

    Scene scene;
    scene.width = chart.width;
    scene.height = chart.height;
    std::vector<Paint> paints;
    for (std::size_t k = 0; k < chart.categories.size(); ++k)
        paints.push_back(detail::category_paint(scene, k, chart.categories[k], glyphs));

    const auto frame = detail::frame_for(chart);
    scene.ops.push_back(GroupOp{"marks", true});
    switch (chart.kind) {
    case ChartKind::Bar: detail::bar_marks(scene, chart, data, frame.plot, paints, opts.selected); break;
    case ChartKind::Pie: detail::pie_marks(scene, chart, data, frame.plot, paints, opts.selected); break;
    case ChartKind::Map: detail::map_marks(scene, chart, data, frame.plot, paints, opts.selected); break;
    }
    scene.ops.push_back(GroupOp{"marks", false});

    if (chart.legend != LegendPlacement::None) {
        std::vector<LegendEntry> entries;
        for (std::size_t k = 0; k < chart.categories.size(); ++k)
            entries.push_back({chart.categories[k].name, paints[k]});
        append_legend(scene, entries, kSwatchSize, frame.legend_origin, frame.legend_horizontal, frame.legend_extent,
                      opts.selected);
    }
    return scene;
}

/// SVG 1.1 document for the chart.
inline std::string render_chart(const ChartSpec& chart, const Dataset& data, const RenderOptions& opts = {}) {
    return to_svg(build_chart_scene(chart, data, opts));
}

/// Legend rows as an SVG `<g>` fragment. Swatches reference the same pattern
/// ids as the chart marks; pair with the chart's `<defs>`.
inline std::string render_legend(const std::vector<Category>& categories, double swatch_size,
                                 const GlyphRegistry& glyphs = GlyphRegistry::builtin()) {
    if (categories.empty()) fail(ErrorCode::InvalidSpec, "legend needs at least one category");
    Scene scene;
    std::vector<LegendEntry> entries;
    for (std::size_t k = 0; k < categories.size(); ++k)
        entries.push_back({categories[k].name, detail::category_paint(scene, k, categories[k], glyphs)});
    const Box used = append_legend(scene, entries, swatch_size, {0, 0}, false, 0.0);
    scene.width = used.max.x;
    scene.height = used.max.y;
    return ops_svg(scene, 0, scene.ops.size());
}

} // namespace bwtex
