#pragma once

// Retained drawing model shared by the SVG writer and the rasterizer, so the
// pixels used by tests come from the same description as the emitted SVG.

#include "bwtex/geometry.hpp"
#include "bwtex/raster.hpp"
#include "bwtex/svg.hpp"
#include "bwtex/texture.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bwtex {

struct PatternDef {
    std::string id;
    TileGeometry tile;
};

/// Flat paint: SVG colour text plus the gray level used when rasterizing.
struct SolidPaint {
    std::string color;
    std::uint8_t gray = 0;
};

struct PatternPaint {
    std::size_t pattern = 0;  // index into Scene::patterns
};

using Paint = std::variant<SolidPaint, PatternPaint>;

inline SolidPaint black_paint() { return {"#000000", kBlack}; }
inline SolidPaint white_paint() { return {"#ffffff", kWhite}; }
inline SolidPaint gray_paint(double level) { return {svg::gray_hex(level), gray_value(level)}; }

struct FillOp {
    Shape shape;
    Paint paint;
    std::string ref;  // element id, empty for none
};

/// Stroke centred on the shape boundary with round joins.
struct StrokeOp {
    Shape shape;
    double width = 1.0;
    SolidPaint paint;
};

enum class TextAnchor { Start, Middle, End };

struct TextOp {
    Vec2 position;
    std::string text;
    double font_size = 12.0;
    TextAnchor anchor = TextAnchor::Start;
};

struct GroupOp {
    std::string id;
    bool open = true;
};

using DrawOp = std::variant<FillOp, StrokeOp, TextOp, GroupOp>;

struct Scene {
    double width = 0.0;
    double height = 0.0;
    std::vector<PatternDef> patterns;
    std::vector<DrawOp> ops;
    std::vector<std::string> warnings;

    const FillOp* find_fill(std::string_view ref) const {
        for (const auto& op : ops)
            if (const auto* f = std::get_if<FillOp>(&op); f && f->ref == ref) return f;
        return nullptr;
    }
};

/// Evaluates a tiled pattern at device-space points.
class TileSampler {
public:
    explicit TileSampler(const TileGeometry& tile) : tile_(&tile), inverse_(tile.transform().inverse()) {
        cols_ = std::clamp(static_cast<int>(tile.cell_width / 4.0), 1, 64);
        rows_ = std::clamp(static_cast<int>(tile.cell_height / 4.0), 1, 64);
        buckets_.resize(static_cast<std::size_t>(cols_) * rows_);
        for (std::size_t k = 0; k < tile.elements.size(); ++k) {
            const Box b = bounds(tile.elements[k]);
            const int c0 = std::clamp(static_cast<int>(std::floor(b.min.x / tile.cell_width * cols_)), 0, cols_ - 1);
            const int c1 = std::clamp(static_cast<int>(std::floor(b.max.x / tile.cell_width * cols_)), 0, cols_ - 1);
            const int r0 = std::clamp(static_cast<int>(std::floor(b.min.y / tile.cell_height * rows_)), 0, rows_ - 1);
            const int r1 = std::clamp(static_cast<int>(std::floor(b.max.y / tile.cell_height * rows_)), 0, rows_ - 1);
            for (int r = r0; r <= r1; ++r)
                for (int c = c0; c <= c1; ++c) buckets_[static_cast<std::size_t>(r) * cols_ + c].push_back(k);
        }
    }

    bool inked(Vec2 device) const {
        const Vec2 p = inverse_.apply(device);
        const double x = detail::wrap_into(p.x, tile_->cell_width);
        const double y = detail::wrap_into(p.y, tile_->cell_height);
        const int c = std::min(cols_ - 1, static_cast<int>(x / tile_->cell_width * cols_));
        const int r = std::min(rows_ - 1, static_cast<int>(y / tile_->cell_height * rows_));
        for (std::size_t k : buckets_[static_cast<std::size_t>(r) * cols_ + c])
            if (contains(tile_->elements[k], {x, y})) return true;
        return false;
    }

    std::uint8_t value(Vec2 device) const { return inked(device) ? tile_->ink_value() : tile_->background_value(); }

private:
    const TileGeometry* tile_;
    Affine inverse_;
    int cols_ = 1;
    int rows_ = 1;
    std::vector<std::vector<std::size_t>> buckets_;
};

/// Point-sampled rendering of the scene at `pixels_per_unit`. Text is not drawn.
inline GrayImage rasterize_scene(const Scene& scene, double pixels_per_unit) {
    const PixelGrid grid = PixelGrid::covering(scene.width, scene.height, pixels_per_unit);
    GrayImage img(grid.width, grid.height, kWhite);
    std::vector<TileSampler> samplers;
    samplers.reserve(scene.patterns.size());
    for (const auto& p : scene.patterns) samplers.emplace_back(p.tile);

    for (const auto& op : scene.ops) {
        if (const auto* f = std::get_if<FillOp>(&op)) {
            if (const auto* solid = std::get_if<SolidPaint>(&f->paint)) {
                fill_shape(img, grid, f->shape, solid->gray);
                continue;
            }
            const TileSampler& sampler = samplers.at(std::get<PatternPaint>(f->paint).pattern);
            int i0, i1, j0, j1;
            grid.index_range(bounds(f->shape), i0, i1, j0, j1);
            for (int j = j0; j < j1; ++j)
                for (int i = i0; i < i1; ++i) {
                    const Vec2 p = grid.sample(i, j);
                    if (contains(f->shape, p)) img.at(i, j) = sampler.value(p);
                }
        } else if (const auto* s = std::get_if<StrokeOp>(&op)) {
            stroke_shape(img, grid, s->shape, s->width, s->paint.gray);
        }
    }
    return img;
}

namespace detail {

inline std::string paint_attr(const Scene& scene, const Paint& paint) {
    if (const auto* solid = std::get_if<SolidPaint>(&paint)) return solid->color;
    return "url(#" + scene.patterns.at(std::get<PatternPaint>(paint).pattern).id + ")";
}

inline std::string_view anchor_name(TextAnchor a) {
    switch (a) {
    case TextAnchor::Start: return "start";
    case TextAnchor::Middle: return "middle";
    case TextAnchor::End: return "end";
    }
    return "start";
}

inline std::string op_svg(const Scene& scene, const DrawOp& op) {
    if (const auto* f = std::get_if<FillOp>(&op)) {
        std::string out = svg::shape_element(f->shape);
        if (!f->ref.empty()) out += " id=\"" + svg::escape(f->ref) + "\"";
        out += " fill=\"" + paint_attr(scene, f->paint) + "\"";
        if (std::holds_alternative<Polygon>(f->shape)) out += " fill-rule=\"evenodd\"";
        if (const auto* ring = std::get_if<Ring>(&f->shape))
            out = svg::shape_element(f->shape) + " fill=\"none\" stroke=\"" + paint_attr(scene, f->paint) +
                  "\" stroke-width=\"" + svg::num(ring->outer - ring->inner) + "\"";
        return out + "/>\n";
    }
    if (const auto* s = std::get_if<StrokeOp>(&op)) {
        return svg::shape_element(s->shape) + " fill=\"none\" stroke=\"" + s->paint.color + "\" stroke-width=\"" +
               svg::num(s->width) + "\" stroke-linejoin=\"round\"/>\n";
    }
    if (const auto* t = std::get_if<TextOp>(&op)) {
        return "<text x=\"" + svg::num(t->position.x) + "\" y=\"" + svg::num(t->position.y) +
               "\" font-family=\"sans-serif\" font-size=\"" + svg::num(t->font_size) + "\" text-anchor=\"" +
               std::string(anchor_name(t->anchor)) + "\">" + svg::escape(t->text) + "</text>\n";
    }
    const auto& g = std::get<GroupOp>(op);
    return g.open ? "<g id=\"" + svg::escape(g.id) + "\">\n" : "</g>\n";
}

} // namespace detail

/// Pattern definitions as a `<defs>` block.
inline std::string defs_svg(const Scene& scene) {
    std::string out = "<defs>\n";
    for (const auto& p : scene.patterns) out += emit_pattern(p.tile, p.id);
    out += "</defs>\n";
    return out;
}

/// Serializes the ops in [first, last) without defs.
inline std::string ops_svg(const Scene& scene, std::size_t first, std::size_t last) {
    std::string out;
    for (std::size_t k = first; k < last && k < scene.ops.size(); ++k) out += detail::op_svg(scene, scene.ops[k]);
    return out;
}

/// Standalone SVG 1.1 document.
inline std::string to_svg(const Scene& scene) {
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + svg::num(scene.width) +
           "\" height=\"" + svg::num(scene.height) + "\" viewBox=\"0 0 " + svg::num(scene.width) + " " +
           svg::num(scene.height) + "\">\n";
    out += defs_svg(scene);
    out += "<rect x=\"0\" y=\"0\" width=\"" + svg::num(scene.width) + "\" height=\"" + svg::num(scene.height) +
           "\" fill=\"#ffffff\"/>\n";
    out += ops_svg(scene, 0, scene.ops.size());
    out += "</svg>\n";
    return out;
}

} // namespace bwtex
