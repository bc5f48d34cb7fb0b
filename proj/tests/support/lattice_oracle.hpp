#pragma once

// Test-only evaluation of a texture as an infinite, unclipped pattern. It
// enumerates lattice primitives around each query point directly from the
// spec (no tile, no wrapping of geometry), with its own scalar SplitMix64, so
// a tile that is missing wrapped copies will disagree with it at the seams.

#include "bwtex/glyphs.hpp"
#include "bwtex/texture.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace oracle {

inline std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Jitter (dx, dy) of lattice cell (i, j) replayed from the RNG contract:
/// state = seed ^ mix(i << 32 | j); two draws of state += golden, mix(state);
/// u = top 53 bits / 2^53; offset = (2u - 1) · randomness · pitch / 2.
inline std::pair<double, double> jitter(std::uint64_t seed, std::uint32_t i, std::uint32_t j, double randomness,
                                        double pitch) {
    if (randomness == 0.0) return {0.0, 0.0};
    std::uint64_t state = seed ^ mix((static_cast<std::uint64_t>(i) << 32) | j);
    auto draw = [&] {
        state += 0x9E3779B97F4A7C15ULL;
        return static_cast<double>(mix(state) >> 11) / 9007199254740992.0;
    };
    const double a = randomness * pitch / 2.0;
    const double ux = draw();
    const double uy = draw();
    return {(2.0 * ux - 1.0) * a, (2.0 * uy - 1.0) * a};
}

inline int lattice_n(double density) { return std::max(1, static_cast<int>(std::lround(density))); }

inline int mod(long long v, int n) {
    const long long r = v % n;
    return static_cast<int>(r < 0 ? r + n : r);
}

/// True when pattern-space point (x, y) is inked by the infinite texture.
class InfinitePattern {
public:
    explicit InfinitePattern(const bwtex::TextureSpec& spec) : spec_(spec) {
        pitch_ = 100.0 / spec.density;
        n_ = lattice_n(spec.density);
        if (const auto* icon = std::get_if<bwtex::IconPrimitive>(&spec.primitive))
            glyph_ = &bwtex::GlyphRegistry::builtin().at(bwtex::resolved_glyph_id(*icon));
        if (const auto* g = std::get_if<bwtex::GridPrimitive>(&spec.primitive))
            sin_angle_ = std::sin(g->crossing_angle_deg * M_PI / 180.0);
    }

    bool inked(double x, double y) const {
        using namespace bwtex;
        const double w = spec_.size;
        if (std::holds_alternative<LinePrimitive>(spec_.primitive) ||
            std::holds_alternative<GridPrimitive>(spec_.primitive)) {
            if (near_family(y - spec_.phase.y, pitch_, w)) return true;
            if (std::holds_alternative<GridPrimitive>(spec_.primitive))
                return near_family(x - spec_.phase.x, pitch_ / sin_angle_, w / sin_angle_);
            return false;
        }
        const double reach = w * (glyph_ ? 0.75 : 1.0) + spec_.randomness * pitch_ / 2.0;
        const long long i0 = static_cast<long long>(std::floor((x - spec_.phase.x - reach) / pitch_ - 0.5));
        const long long i1 = static_cast<long long>(std::ceil((x - spec_.phase.x + reach) / pitch_ - 0.5));
        const long long j0 = static_cast<long long>(std::floor((y - spec_.phase.y - reach) / pitch_ - 0.5));
        const long long j1 = static_cast<long long>(std::ceil((y - spec_.phase.y + reach) / pitch_ - 0.5));
        for (long long j = j0; j <= j1; ++j) {
            for (long long i = i0; i <= i1; ++i) {
                const auto [dx, dy] = jitter(spec_.seed, static_cast<std::uint32_t>(mod(i, n_)),
                                             static_cast<std::uint32_t>(mod(j, n_)), spec_.randomness, pitch_);
                const double cx = (i + 0.5) * pitch_ + dx + spec_.phase.x;
                const double cy = (j + 0.5) * pitch_ + dy + spec_.phase.y;
                if (hits(x - cx, y - cy)) return true;
            }
        }
        return false;
    }

private:
    static bool near_family(double v, double pitch, double width) {
        const double k = std::round(v / pitch - 0.5);
        return std::abs(v - (k + 0.5) * pitch) <= width / 2.0;
    }

    bool hits(double dx, double dy) const {
        const double r = spec_.size;
        if (const auto* dot = std::get_if<bwtex::DotPrimitive>(&spec_.primitive)) {
            const double d2 = dx * dx + dy * dy;
            if (dot->filled) return d2 <= r * r;
            const double inner = r * (1.0 - bwtex::kHollowDotStrokeFraction);
            return d2 <= r * r && d2 >= inner * inner;
        }
        // Undo scale and primitive rotation to reach glyph coordinates.
        const double a = -spec_.primitive_rotation_deg * M_PI / 180.0;
        const double gx = (dx * std::cos(a) - dy * std::sin(a)) / r;
        const double gy = (dx * std::sin(a) + dy * std::cos(a)) / r;
        if (std::abs(gx) > 0.75 || std::abs(gy) > 0.75) return false;
        for (const auto& part : glyph_->parts) {
            bool in = false;
            for (const auto& c : part.contours) {
                const std::size_t n = c.size();
                for (std::size_t p = 0, q = n - 1; p < n; q = p++) {
                    if ((c[p].y > gy) != (c[q].y > gy) &&
                        gx < (c[q].x - c[p].x) * (gy - c[p].y) / (c[q].y - c[p].y) + c[p].x)
                        in = !in;
                }
            }
            if (in) return true;
        }
        return false;
    }

    bwtex::TextureSpec spec_;
    double pitch_ = 1.0;
    int n_ = 1;
    double sin_angle_ = 1.0;
    const bwtex::IconGlyph* glyph_ = nullptr;
};

} // namespace oracle
