#pragma once

#include "bwtex/geometry.hpp"

#include <cstdint>
#include <vector>

namespace bwtex {

/// 8-bit grayscale image, 0 = black, 255 = white. Row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 255)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {}

    std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const GrayImage&) const = default;
};

inline constexpr std::uint8_t kBlack = 0;
inline constexpr std::uint8_t kWhite = 255;

inline std::uint8_t gray_value(double level) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(level, 0.0, 1.0) * 255.0));
}

/// Maps pixel (i, j) to the world-space sample at its centre.
struct PixelGrid {
    int width = 0;
    int height = 0;
    Vec2 origin;          // world position of pixel (0, 0)'s top-left corner
    Vec2 pixel_size{1, 1};  // world units per pixel

    static PixelGrid covering(double world_w, double world_h, double pixels_per_unit, Vec2 origin = {}) {
        const int w = std::max(1, static_cast<int>(std::lround(world_w * pixels_per_unit)));
        const int h = std::max(1, static_cast<int>(std::lround(world_h * pixels_per_unit)));
        return {w, h, origin, {world_w / w, world_h / h}};
    }

    Vec2 sample(int i, int j) const {
        return {origin.x + (i + 0.5) * pixel_size.x, origin.y + (j + 0.5) * pixel_size.y};
    }

    /// Half-open pixel index range whose centres may fall inside `b`.
    void index_range(const Box& b, int& i0, int& i1, int& j0, int& j1) const {
        i0 = std::max(0, static_cast<int>(std::floor((b.min.x - origin.x) / pixel_size.x - 0.5)));
        i1 = std::min(width, static_cast<int>(std::ceil((b.max.x - origin.x) / pixel_size.x + 0.5)));
        j0 = std::max(0, static_cast<int>(std::floor((b.min.y - origin.y) / pixel_size.y - 0.5)));
        j1 = std::min(height, static_cast<int>(std::ceil((b.max.y - origin.y) / pixel_size.y + 0.5)));
    }
};

/// Point-sampled (no anti-aliasing) fill of `shape` with `value`, restricted to
/// the pixel rectangle [ci0, ci1) × [cj0, cj1).
inline void fill_shape(GrayImage& img, const PixelGrid& grid, const Shape& shape, std::uint8_t value, int ci0, int ci1,
                       int cj0, int cj1) {
    int i0, i1, j0, j1;
    grid.index_range(bounds(shape), i0, i1, j0, j1);
    i0 = std::max(i0, ci0);
    i1 = std::min(i1, ci1);
    j0 = std::max(j0, cj0);
    j1 = std::min(j1, cj1);
    for (int j = j0; j < j1; ++j)
        for (int i = i0; i < i1; ++i)
            if (contains(shape, grid.sample(i, j))) img.at(i, j) = value;
}

inline void fill_shape(GrayImage& img, const PixelGrid& grid, const Shape& shape, std::uint8_t value) {
    fill_shape(img, grid, shape, value, 0, img.width, 0, img.height);
}

/// Stroke of width `width` centred on the boundary of `shape` (round joins).
inline void stroke_shape(GrayImage& img, const PixelGrid& grid, const Shape& shape, double width, std::uint8_t value) {
    if (width <= 0.0) return;
    const double half = width / 2.0;
    int i0, i1, j0, j1;
    grid.index_range(bounds(shape).inflated(half), i0, i1, j0, j1);
    for (int j = j0; j < j1; ++j)
        for (int i = i0; i < i1; ++i)
            if (boundary_distance(shape, grid.sample(i, j)) <= half) img.at(i, j) = value;
}

inline std::size_t count_value(const GrayImage& img, std::uint8_t value) {
    std::size_t n = 0;
    for (auto p : img.pixels) n += (p == value);
    return n;
}

} // namespace bwtex
