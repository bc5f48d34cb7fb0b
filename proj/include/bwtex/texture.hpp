#pragma once

#include "bwtex/error.hpp"
#include "bwtex/geometry.hpp"
#include "bwtex/glyphs.hpp"
#include "bwtex/raster.hpp"
#include "bwtex/rng.hpp"
#include "bwtex/svg.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace bwtex {

struct DotPrimitive {
    bool filled = true;
    bool operator==(const DotPrimitive&) const = default;
};

struct LinePrimitive {
    bool operator==(const LinePrimitive&) const = default;
};

struct GridPrimitive {
    double crossing_angle_deg = 90.0;
    bool operator==(const GridPrimitive&) const = default;
};

/// `glyph_id` names the artwork (e.g. "carrot"); the style picks the variant.
struct IconPrimitive {
    std::string glyph_id;
    IconStyle style;
    bool operator==(const IconPrimitive&) const = default;
};

using PrimitiveKind = std::variant<DotPrimitive, LinePrimitive, GridPrimitive, IconPrimitive>;

inline bool is_icon(const PrimitiveKind& k) { return std::holds_alternative<IconPrimitive>(k); }
inline bool is_geometric(const PrimitiveKind& k) { return !is_icon(k); }

inline std::string_view kind_name(const PrimitiveKind& k) {
    static constexpr std::string_view kNames[] = {"dot", "line", "grid", "icon"};
    return kNames[k.index()];
}

enum class Background { White, Black };

inline std::string_view to_string(Background b) { return b == Background::White ? "white" : "black"; }

/// Complete parameterization of one black-and-white texture.
///
/// Lengths are in abstract units. `density` counts primitives per 100 units
/// of length, so the lattice pitch (line spacing for line and grid kinds) is
/// 100 / density. `size` is the stroke width for lines and grids, the radius
/// for dots and the bounding-box edge for icons. `randomness` jitters dots and
/// icons by up to ±randomness·pitch/2 on each axis.
struct TextureSpec {
    PrimitiveKind primitive = LinePrimitive{};
    double density = 10.0;
    double size = 1.0;
    double orientation_deg = 0.0;
    double primitive_rotation_deg = 0.0;
    Background background = Background::White;
    double randomness = 0.0;
    Vec2 phase;
    std::uint64_t seed = 0;

    double pitch() const { return 100.0 / density; }

    bool operator==(const TextureSpec&) const = default;
};

struct BuildOptions {
    /// Smallest allowed pitch as a multiple of `size`.
    double min_pitch_ratio = 0.25;
    double max_density = 200.0;
};

/// Resolved artwork key for an icon primitive.
inline std::string resolved_glyph_id(const IconPrimitive& icon) { return glyph_id(icon.glyph_id, icon.style); }

inline void validate(const TextureSpec& spec, const GlyphRegistry& glyphs = GlyphRegistry::builtin(),
                     const BuildOptions& opts = {}) {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(spec.density) || spec.density <= 0.0) fail(ErrorCode::InvalidSpec, "density must be positive");
    if (spec.density > opts.max_density)
        fail(ErrorCode::InvalidSpec, "density exceeds " + svg::num(opts.max_density));
    if (!finite(spec.size) || spec.size <= 0.0) fail(ErrorCode::InvalidSpec, "size must be positive");
    if (!finite(spec.orientation_deg) || !finite(spec.primitive_rotation_deg))
        fail(ErrorCode::InvalidSpec, "orientation must be finite");
    if (!(spec.randomness >= 0.0 && spec.randomness <= 1.0))
        fail(ErrorCode::InvalidSpec, "randomness must lie in [0, 1]");
    if (!finite(spec.phase.x) || !finite(spec.phase.y)) fail(ErrorCode::InvalidSpec, "phase must be finite");
    if (spec.pitch() < spec.size * opts.min_pitch_ratio)
        fail(ErrorCode::InvalidSpec, "pitch " + svg::num(spec.pitch()) + " is below the floor for size " +
                                         svg::num(spec.size));
    if (const auto* g = std::get_if<GridPrimitive>(&spec.primitive)) {
        if (!(g->crossing_angle_deg > 0.0 && g->crossing_angle_deg < 180.0))
            fail(ErrorCode::InvalidSpec, "grid crossing angle must lie in (0, 180)");
    }
    if (const auto* icon = std::get_if<IconPrimitive>(&spec.primitive)) {
        if (!glyphs.contains(resolved_glyph_id(*icon)))
            fail(ErrorCode::UnknownGlyph, "glyph '" + resolved_glyph_id(*icon) + "' is not registered");
    }
}

/// One seamlessly repeating cell of a texture, in pattern space. The pattern
/// is placed in device space by `transform` (rotation, plus a skew for
/// non-perpendicular grids).
struct TileGeometry {
    double cell_width = 0.0;
    double cell_height = 0.0;
    /// Ink shapes, including wrapped copies of primitives that cross the cell edge.
    std::vector<Shape> elements;
    Background background = Background::White;
    double rotation_deg = 0.0;
    double skew_x_deg = 0.0;

    Affine transform() const { return Affine::rotate(rotation_deg).then_after(Affine::skew_x(skew_x_deg)); }
    std::uint8_t ink_value() const { return background == Background::White ? kBlack : kWhite; }
    std::uint8_t background_value() const { return background == Background::White ? kWhite : kBlack; }
};

namespace detail {

inline double wrap_into(double v, double period) {
    double r = v - std::floor(v / period) * period;
    if (r >= period) r = 0.0;
    return r;
}

/// Appends `shape` and every cell-translated copy that overlaps the cell.
inline void add_wrapped(std::vector<Shape>& out, const Shape& shape, double w, double h) {
    const Box b = bounds(shape);
    const Box cell{{0, 0}, {w, h}};
    const int kx = static_cast<int>(std::ceil(std::max(b.width(), 0.0) / w)) + 1;
    const int ky = static_cast<int>(std::ceil(std::max(b.height(), 0.0) / h)) + 1;
    for (int oy = -ky; oy <= ky; ++oy) {
        for (int ox = -kx; ox <= kx; ++ox) {
            const Vec2 off{ox * w, oy * h};
            const Box moved{b.min + off, b.max + off};
            if (moved.intersects(cell)) out.push_back(ox == 0 && oy == 0 ? shape : translated(shape, off));
        }
    }
}

inline Vec2 lattice_jitter(const TextureSpec& spec, std::uint32_t i, std::uint32_t j, double pitch) {
    if (spec.randomness == 0.0) return {};
    auto stream = lattice_stream(spec.seed, i, j);
    const double amplitude = spec.randomness * pitch / 2.0;
    const double ux = stream.uniform();
    const double uy = stream.uniform();
    return {(2.0 * ux - 1.0) * amplitude, (2.0 * uy - 1.0) * amplitude};
}

inline int lattice_count(double density) { return std::max(1, static_cast<int>(std::lround(density))); }

inline Polygon horizontal_strip(double y_center, double width, double x_extent) {
    return rectangle(0.0, y_center - width / 2.0, x_extent, width);
}

inline Polygon vertical_strip(double x_center, double width, double y_extent) {
    return rectangle(x_center - width / 2.0, 0.0, width, y_extent);
}

} // namespace detail

/// Hollow dots are rings whose stroke is a third of the radius.
inline constexpr double kHollowDotStrokeFraction = 1.0 / 3.0;

inline TileGeometry build_tile(const TextureSpec& spec, const GlyphRegistry& glyphs = GlyphRegistry::builtin(),
                               const BuildOptions& opts = {}) {
    validate(spec, glyphs, opts);
    TileGeometry tile;
    tile.background = spec.background;
    tile.rotation_deg = wrap_angle(spec.orientation_deg);

    const double pitch = spec.pitch();
    const int n = detail::lattice_count(spec.density);
    const double w = spec.size;

    if (std::holds_alternative<LinePrimitive>(spec.primitive) || std::holds_alternative<GridPrimitive>(spec.primitive)) {
        double x_pitch = pitch;
        double x_width = w;
        const auto* grid = std::get_if<GridPrimitive>(&spec.primitive);
        if (grid) {
            // The second family is drawn vertical and sheared into place, so its
            // pre-shear pitch and width are widened by 1/sin(angle).
            const double s = std::sin(deg_to_rad(grid->crossing_angle_deg));
            x_pitch = pitch / s;
            x_width = w / s;
            tile.skew_x_deg = 90.0 - grid->crossing_angle_deg;
        }
        tile.cell_width = n * x_pitch;
        tile.cell_height = n * pitch;
        for (int k = 0; k < n; ++k) {
            const double y = detail::wrap_into((k + 0.5) * pitch + spec.phase.y, tile.cell_height);
            detail::add_wrapped(tile.elements, detail::horizontal_strip(y, w, tile.cell_width), tile.cell_width,
                                tile.cell_height);
        }
        if (grid) {
            for (int k = 0; k < n; ++k) {
                const double x = detail::wrap_into((k + 0.5) * x_pitch + spec.phase.x, tile.cell_width);
                detail::add_wrapped(tile.elements, detail::vertical_strip(x, x_width, tile.cell_height),
                                    tile.cell_width, tile.cell_height);
            }
        }
        return tile;
    }

    tile.cell_width = n * pitch;
    tile.cell_height = n * pitch;

    const IconGlyph* glyph = nullptr;
    Affine icon_frame;
    if (const auto* icon = std::get_if<IconPrimitive>(&spec.primitive)) {
        glyph = &glyphs.at(resolved_glyph_id(*icon));
        icon_frame = Affine::rotate(spec.primitive_rotation_deg).then_after(Affine::scale(spec.size));
    }

    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const Vec2 jitter = detail::lattice_jitter(spec, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), pitch);
            const Vec2 center{detail::wrap_into((i + 0.5) * pitch + jitter.x + spec.phase.x, tile.cell_width),
                              detail::wrap_into((j + 0.5) * pitch + jitter.y + spec.phase.y, tile.cell_height)};
            if (const auto* dot = std::get_if<DotPrimitive>(&spec.primitive)) {
                const Shape s = dot->filled ? Shape{Circle{center, w}}
                                            : Shape{Ring{center, w, w * (1.0 - kHollowDotStrokeFraction)}};
                detail::add_wrapped(tile.elements, s, tile.cell_width, tile.cell_height);
            } else {
                const Affine place = Affine::translate(center.x, center.y).then_after(icon_frame);
                for (const auto& part : glyph->parts)
                    detail::add_wrapped(tile.elements, transformed(part, place), tile.cell_width, tile.cell_height);
            }
        }
    }
    return tile;
}

/// SVG 1.1 `<pattern>` element for the tile, anchored at the user-space origin.
inline std::string emit_pattern(const TileGeometry& tile, std::string_view pattern_id) {
    const std::string ink = tile.background == Background::White ? "#000000" : "#ffffff";
    const std::string paper = tile.background == Background::White ? "#ffffff" : "#000000";
    std::string out = "<pattern id=\"" + svg::escape(pattern_id) +
                      "\" patternUnits=\"userSpaceOnUse\" x=\"0\" y=\"0\" width=\"" + svg::num(tile.cell_width) +
                      "\" height=\"" + svg::num(tile.cell_height) + "\"";
    std::string xf;
    if (tile.rotation_deg != 0.0) xf += "rotate(" + svg::num(tile.rotation_deg) + ")";
    if (tile.skew_x_deg != 0.0) xf += std::string(xf.empty() ? "" : " ") + "skewX(" + svg::num(tile.skew_x_deg) + ")";
    if (!xf.empty()) out += " patternTransform=\"" + xf + "\"";
    out += ">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + svg::num(tile.cell_width) + "\" height=\"" + svg::num(tile.cell_height) +
           "\" fill=\"" + paper + "\"/>\n";
    for (const auto& e : tile.elements) {
        if (const auto* ring = std::get_if<Ring>(&e)) {
            out += svg::shape_element(e) + " fill=\"none\" stroke=\"" + ink + "\" stroke-width=\"" +
                   svg::num(ring->outer - ring->inner) + "\"/>\n";
        } else if (std::holds_alternative<Polygon>(e)) {
            out += svg::shape_element(e) + " fill=\"" + ink + "\" fill-rule=\"evenodd\"/>\n";
        } else {
            out += svg::shape_element(e) + " fill=\"" + ink + "\"/>\n";
        }
    }
    out += "</pattern>\n";
    return out;
}

/// Rasterizes one tile in pattern space. Pixels per side are rounded so the
/// tile spans a whole number of pixels.
inline GrayImage rasterize_tile(const TileGeometry& tile, double pixels_per_unit) {
    const PixelGrid grid = PixelGrid::covering(tile.cell_width, tile.cell_height, pixels_per_unit);
    GrayImage img(grid.width, grid.height, tile.background_value());
    for (const auto& e : tile.elements) fill_shape(img, grid, e, tile.ink_value());
    return img;
}

/// Rasterizes an nx × ny arrangement of tile copies, each clipped to its own cell.
inline GrayImage rasterize_tiling(const TileGeometry& tile, double pixels_per_unit, int nx, int ny) {
    const PixelGrid one = PixelGrid::covering(tile.cell_width, tile.cell_height, pixels_per_unit);
    const PixelGrid grid{one.width * nx, one.height * ny, {}, one.pixel_size};
    GrayImage img(grid.width, grid.height, tile.background_value());
    for (int ty = 0; ty < ny; ++ty) {
        for (int tx = 0; tx < nx; ++tx) {
            const Vec2 off{tx * tile.cell_width, ty * tile.cell_height};
            for (const auto& e : tile.elements)
                fill_shape(img, grid, translated(e, off), tile.ink_value(), tx * one.width, (tx + 1) * one.width,
                           ty * one.height, (ty + 1) * one.height);
        }
    }
    return img;
}

/// Fraction of a rasterized tile covered by the ink (contrast) colour.
inline double ink_ratio(const TextureSpec& spec, double pixels_per_unit,
                        const GlyphRegistry& glyphs = GlyphRegistry::builtin()) {
    if (!(pixels_per_unit >= 2.0)) fail(ErrorCode::InvalidSpec, "ink ratio resolution must be at least 2 px/unit");
    const TileGeometry tile = build_tile(spec, glyphs);
    const GrayImage img = rasterize_tile(tile, pixels_per_unit);
    return static_cast<double>(count_value(img, tile.ink_value())) / static_cast<double>(img.pixels.size());
}

/// Black fraction of the texture: ink coverage on white, its complement on black.
inline double darkness(const TextureSpec& spec, double pixels_per_unit,
                       const GlyphRegistry& glyphs = GlyphRegistry::builtin()) {
    const double ink = ink_ratio(spec, pixels_per_unit, glyphs);
    return spec.background == Background::White ? ink : 1.0 - ink;
}

/// Scales primitive size by k and divides density by k, keeping the ink ratio.
inline TextureSpec scale_in_sync(const TextureSpec& spec, double k,
                                 const GlyphRegistry& glyphs = GlyphRegistry::builtin()) {
    if (!(k > 0.0) || !std::isfinite(k)) fail(ErrorCode::InvalidSpec, "scale factor must be positive");
    TextureSpec out = spec;
    out.size = spec.size * k;
    out.density = spec.density / k;
    validate(out, glyphs);
    return out;
}

/// Exchanges two textures' parameters. Icons keep their own artwork when both
/// sides are icons; otherwise the whole spec, kind included, moves.
inline std::pair<TextureSpec, TextureSpec> swap_parameters(const TextureSpec& a, const TextureSpec& b) {
    TextureSpec first = b;
    TextureSpec second = a;
    const auto* ia = std::get_if<IconPrimitive>(&a.primitive);
    const auto* ib = std::get_if<IconPrimitive>(&b.primitive);
    if (ia && ib) {
        std::get<IconPrimitive>(first.primitive).glyph_id = ia->glyph_id;
        std::get<IconPrimitive>(second.primitive).glyph_id = ib->glyph_id;
    }
    return {std::move(first), std::move(second)};
}

// --- lint -------------------------------------------------------------------

enum class Severity { Warning, Error };

inline std::string_view to_string(Severity s) { return s == Severity::Warning ? "warning" : "error"; }

struct LintFinding {
    std::size_t first = 0;
    std::size_t second = 0;
    std::string rule_id;
    Severity severity = Severity::Warning;
    std::string message;
};

struct LintReport {
    std::vector<LintFinding> findings;

    bool clean() const { return findings.empty(); }
    std::size_t count(std::string_view rule) const {
        return static_cast<std::size_t>(
            std::count_if(findings.begin(), findings.end(), [&](const auto& f) { return f.rule_id == rule; }));
    }
};

inline constexpr std::string_view kOrientationTooClose = "ORIENTATION_TOO_CLOSE";
inline constexpr std::string_view kInkTooClose = "INK_TOO_CLOSE";

struct LintOptions {
    double min_orientation_deg = 30.0;
    double min_spacing_ratio = 2.0;
    double min_darkness_gap = 0.05;
    double pixels_per_unit = 4.0;
};

/// Period after which the pattern's orientation repeats.
inline double rotational_period(const PrimitiveKind& a, const PrimitiveKind& b) {
    if (std::holds_alternative<LinePrimitive>(a)) return 180.0;
    if (std::holds_alternative<GridPrimitive>(a)) {
        const bool square = std::get<GridPrimitive>(a).crossing_angle_deg == 90.0 &&
                            std::get<GridPrimitive>(b).crossing_angle_deg == 90.0;
        return square ? 90.0 : 180.0;
    }
    return 360.0;
}

inline double orientation_difference(const TextureSpec& a, const TextureSpec& b) {
    const double period = rotational_period(a.primitive, b.primitive);
    const double d = wrap_angle(a.orientation_deg - b.orientation_deg, period);
    return std::min(d, period - d);
}

/// Pairwise discriminability checks for a set of textures used together.
inline LintReport lint_texture_set(const std::vector<TextureSpec>& specs, const LintOptions& opts = {},
                                   const GlyphRegistry& glyphs = GlyphRegistry::builtin()) {
    LintReport report;
    std::vector<double> dark(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) dark[i] = darkness(specs[i], opts.pixels_per_unit, glyphs);

    for (std::size_t i = 0; i < specs.size(); ++i) {
        for (std::size_t j = i + 1; j < specs.size(); ++j) {
            const auto& a = specs[i];
            const auto& b = specs[j];
            if (a.primitive.index() != b.primitive.index()) continue;
            const double angle = orientation_difference(a, b);
            const double ratio = std::max(a.density, b.density) / std::min(a.density, b.density);
            const bool same_bucket = angle < opts.min_orientation_deg;
            if (same_bucket && ratio < opts.min_spacing_ratio) {
                report.findings.push_back({i, j, std::string(kOrientationTooClose), Severity::Error,
                                           "orientations differ by " + svg::num(angle) + "° with spacing ratio " +
                                               svg::num(ratio)});
            }
            const double gap = std::abs(dark[i] - dark[j]);
            if (same_bucket && gap < opts.min_darkness_gap) {
                report.findings.push_back({i, j, std::string(kInkTooClose), Severity::Warning,
                                           "black/white ratios differ by " + svg::num(gap)});
            }
        }
    }
    return report;
}

} // namespace bwtex
