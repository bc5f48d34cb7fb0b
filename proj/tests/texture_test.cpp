#include "bwtex/json.hpp"
#include "bwtex/texture.hpp"

#include "support/lattice_oracle.hpp"
#include "support/svg_pattern_reader.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>
#include <random>
#include <set>

using namespace bwtex;

namespace {

TextureSpec line_spec(double density, double size, double orientation = 0.0) {
    TextureSpec s;
    s.primitive = LinePrimitive{};
    s.density = density;
    s.size = size;
    s.orientation_deg = orientation;
    return s;
}

TextureSpec dot_spec(double density, double radius, double randomness = 0.0, std::uint64_t seed = 0) {
    TextureSpec s;
    s.primitive = DotPrimitive{true};
    s.density = density;
    s.size = radius;
    s.randomness = randomness;
    s.seed = seed;
    return s;
}

TextureSpec icon_spec(std::string glyph, double density, double size) {
    TextureSpec s;
    s.primitive = IconPrimitive{std::move(glyph), {IconDetail::Detailed, IconWeight::Outline}};
    s.density = density;
    s.size = size;
    return s;
}

std::vector<Vec2> primary_centers(const TileGeometry& tile) {
    std::vector<Vec2> out;
    for (const auto& e : tile.elements) {
        const auto& c = std::get<Circle>(e);
        if (c.center.x >= 0 && c.center.x < tile.cell_width && c.center.y >= 0 && c.center.y < tile.cell_height)
            out.push_back(c.center);
    }
    std::sort(out.begin(), out.end(), [](Vec2 a, Vec2 b) { return a.y < b.y || (a.y == b.y && a.x < b.x); });
    return out;
}

} // namespace

TEST(BuildTile, LineDensityTenGivesTenStripesInHundredUnitCell) {
    const auto tile = build_tile(line_spec(10, 1));
    EXPECT_DOUBLE_EQ(tile.cell_width, 100.0);
    EXPECT_DOUBLE_EQ(tile.cell_height, 100.0);
    ASSERT_EQ(tile.elements.size(), 10u);
    std::vector<double> centers;
    for (const auto& e : tile.elements) {
        const Box b = bounds(e);
        EXPECT_NEAR(b.height(), 1.0, 1e-12);
        centers.push_back((b.min.y + b.max.y) / 2.0);
    }
    std::sort(centers.begin(), centers.end());
    for (std::size_t k = 1; k < centers.size(); ++k) EXPECT_NEAR(centers[k] - centers[k - 1], 10.0, 1e-12);
    EXPECT_EQ(tile.rotation_deg, 0.0);
}

TEST(BuildTile, ZeroRandomnessIgnoresSeed) {
    auto a = dot_spec(7, 1.5, 0.0, 1);
    auto b = dot_spec(7, 1.5, 0.0, 987654321);
    const auto ta = build_tile(a);
    const auto tb = build_tile(b);
    EXPECT_EQ(emit_pattern(ta, "p"), emit_pattern(tb, "p"));
}

TEST(BuildTile, JitterMatchesScalarRngOracle) {
    const auto spec = dot_spec(5, 1.0, 0.5, 42);
    const auto tile = build_tile(spec);
    const double pitch = 20.0;
    std::vector<Vec2> expected;
    for (std::uint32_t j = 0; j < 5; ++j) {
        for (std::uint32_t i = 0; i < 5; ++i) {
            const auto [dx, dy] = oracle::jitter(42, i, j, 0.5, pitch);
            EXPECT_LE(std::abs(dx), 5.0);
            EXPECT_LE(std::abs(dy), 5.0);
            double x = std::fmod((i + 0.5) * pitch + dx + 100.0, 100.0);
            double y = std::fmod((j + 0.5) * pitch + dy + 100.0, 100.0);
            expected.push_back({x, y});
        }
    }
    std::sort(expected.begin(), expected.end(), [](Vec2 a, Vec2 b) { return a.y < b.y || (a.y == b.y && a.x < b.x); });
    const auto got = primary_centers(tile);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t k = 0; k < got.size(); ++k) {
        EXPECT_NEAR(got[k].x, expected[k].x, 1e-9);
        EXPECT_NEAR(got[k].y, expected[k].y, 1e-9);
    }
}

TEST(BuildTile, RejectsInvalidSpecs) {
    auto s = line_spec(10, 1);
    s.density = 0;
    EXPECT_THROW(build_tile(s), Error);
    s = line_spec(10, -1);
    EXPECT_THROW(build_tile(s), Error);
    s = line_spec(10, 41);  // pitch 10 < 41/4
    try {
        build_tile(s);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidSpec);
    }
    s = line_spec(10, 1);
    s.primitive = GridPrimitive{180.0};
    EXPECT_THROW(build_tile(s), Error);
    auto icon = icon_spec("durian", 5, 10);
    try {
        build_tile(icon);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownGlyph);
    }
}

TEST(BuildTile, RotationByFullTurnIsIdentity) {
    for (double theta : {0.0, 17.5, 45.0, 300.0}) {
        auto a = line_spec(8, 2, theta);
        auto b = line_spec(8, 2, theta + 360.0);
        const auto ta = build_tile(a);
        const auto tb = build_tile(b);
        EXPECT_NEAR(ta.rotation_deg, tb.rotation_deg, 1e-9);
        const Affine ma = ta.transform(), mb = tb.transform();
        for (Vec2 p : {Vec2{0, 0}, Vec2{100, 0}, Vec2{0, 100}, Vec2{37, 81}}) {
            EXPECT_NEAR(ma.apply(p).x, mb.apply(p).x, 1e-9);
            EXPECT_NEAR(ma.apply(p).y, mb.apply(p).y, 1e-9);
        }
    }
}

TEST(BuildTile, GridCrossingAngleShearsSecondFamily) {
    TextureSpec s = line_spec(10, 1);
    s.primitive = GridPrimitive{60.0};
    const auto tile = build_tile(s);
    EXPECT_NEAR(tile.skew_x_deg, 30.0, 1e-12);
    EXPECT_NEAR(tile.transform().determinant(), 1.0, 1e-12);
    // A vertical line in pattern space lands at 60° from the horizontal family.
    const Affine m = tile.transform();
    const Vec2 d = m.apply({0, 1}) - m.apply({0, 0});
    EXPECT_NEAR(rad_to_deg(std::atan2(d.y, d.x)), 60.0, 1e-9);
}

TEST(BuildTile, IconsCrossingTheEdgeAreWrappedWhole) {
    auto s = icon_spec("carrot", 4, 20);
    s.phase = {12.5, 12.5};  // pushes the first column across the left edge
    const auto tile = build_tile(s);
    const auto& glyph = GlyphRegistry::builtin().at("carrot.detailed.outline");
    // 16 icons, each part duplicated wherever a copy overlaps the cell.
    EXPECT_GT(tile.elements.size(), 16 * glyph.parts.size());
    const GrayImage once = rasterize_tiling(tile, 4, 2, 2);
    oracle::InfinitePattern inf(s);
    const PixelGrid one = PixelGrid::covering(tile.cell_width, tile.cell_height, 4);
    int diff = 0;
    for (int y = 0; y < once.height; ++y)
        for (int x = 0; x < once.width; ++x) {
            const bool ink = once.at(x, y) == kBlack;
            diff += ink != inf.inked((x + 0.5) * one.pixel_size.x, (y + 0.5) * one.pixel_size.y);
        }
    EXPECT_EQ(diff, 0);
}

TEST(EmitPattern, EmptyTileIsOneBackgroundRect) {
    TileGeometry tile;
    tile.cell_width = 100;
    tile.cell_height = 100;
    const auto text = emit_pattern(tile, "empty");
    EXPECT_EQ(text,
              "<pattern id=\"empty\" patternUnits=\"userSpaceOnUse\" x=\"0\" y=\"0\" width=\"100\" height=\"100\">\n"
              "<rect x=\"0\" y=\"0\" width=\"100\" height=\"100\" fill=\"#ffffff\"/>\n"
              "</pattern>\n");
    EXPECT_EQ(oracle::parse_pattern(text).shapes.size(), 0u);
}

TEST(EmitPattern, DeterministicText) {
    auto s = dot_spec(6, 2, 0.8, 99);
    s.orientation_deg = 30;
    EXPECT_EQ(emit_pattern(build_tile(s), "a"), emit_pattern(build_tile(s), "a"));
}

TEST(EmitPattern, RepeatedEmittedPatternHasNoSeams) {
    std::vector<TextureSpec> specs = {dot_spec(5, 3.5, 0.6, 7), line_spec(7, 3), icon_spec("tomato", 3, 25)};
    specs[1].phase = {0, 4.2};
    auto hollow = dot_spec(4, 6, 0.3, 3);
    hollow.primitive = DotPrimitive{false};
    specs.push_back(hollow);
    for (const auto& s : specs) {
        const auto tile = build_tile(s);
        const auto parsed = oracle::parse_pattern(emit_pattern(tile, "p"));
        const auto single = oracle::render_repeat(parsed, 4, 1, 1);
        const auto quad = oracle::render_repeat(parsed, 4, 2, 2);
        int seam_diff = 0;
        for (int y = 0; y < quad.h; ++y)
            for (int x = 0; x < quad.w; ++x) seam_diff += quad.at(x, y) != single.at(x % single.w, y % single.h);
        EXPECT_EQ(seam_diff, 0);

        // Emitted text and in-memory geometry rasterize identically.
        const GrayImage direct = rasterize_tile(tile, 4);
        ASSERT_EQ(direct.width, single.w);
        int mismatch = 0;
        for (int y = 0; y < single.h; ++y)
            for (int x = 0; x < single.w; ++x) mismatch += direct.at(x, y) != single.at(x, y);
        EXPECT_EQ(mismatch, 0) << kind_name(s.primitive);

        // Continuation across the seam matches the unclipped pattern.
        oracle::InfinitePattern inf(s);
        int cont_diff = 0;
        const double px = parsed.width / single.w, py = parsed.height / single.h;
        for (int y = 0; y < quad.h; ++y)
            for (int x = 0; x < quad.w; ++x)
                cont_diff += (quad.at(x, y) == 0) != inf.inked((x + 0.5) * px, (y + 0.5) * py);
        EXPECT_EQ(cont_diff, 0) << kind_name(s.primitive);
    }
}

TEST(InkRatio, EmptyPatternHasNoInk) {
    // A texture whose only stripe is thinner than a pixel row leaves no ink.
    auto white = line_spec(1, 0.01);
    EXPECT_DOUBLE_EQ(ink_ratio(white, 4), 0.0);
    white.background = Background::Black;
    EXPECT_DOUBLE_EQ(ink_ratio(white, 4), 0.0);
}

TEST(InkRatio, LineMatchesAnalyticWidthOverSpacing) {
    EXPECT_NEAR(ink_ratio(line_spec(10, 2), 4), 0.20, 0.01);
    EXPECT_NEAR(ink_ratio(line_spec(10, 2), 2), 0.20, 0.01);
    EXPECT_NEAR(ink_ratio(line_spec(4, 5), 4), 5.0 / 25.0, 0.01);
    EXPECT_THROW(ink_ratio(line_spec(10, 2), 1.5), Error);
}

TEST(InkRatio, BackgroundInversionFlipsEveryPixel) {
    for (auto s : {dot_spec(6, 3), line_spec(9, 2, 20), icon_spec("corn", 4, 18)}) {
        const auto a = rasterize_tile(build_tile(s), 4);
        s.background = Background::Black;
        const auto b = rasterize_tile(build_tile(s), 4);
        ASSERT_EQ(a.pixels.size(), b.pixels.size());
        for (std::size_t k = 0; k < a.pixels.size(); ++k) ASSERT_EQ(a.pixels[k] ^ b.pixels[k], 0xFF);
    }
}

TEST(InkRatio, DensityIsMonotoneAtFixedSize) {
    for (int kind = 0; kind < 3; ++kind) {
        double prev = -1.0;
        for (double density = 1; density <= 30; density += 1) {
            TextureSpec s = kind == 0 ? line_spec(density, 1.0) : dot_spec(density, 1.0);
            if (kind == 2) s.primitive = GridPrimitive{90.0};
            const double ink = ink_ratio(s, 4);
            EXPECT_GE(ink, prev - 0.005) << "kind " << kind << " density " << density;
            prev = ink;
        }
    }
}

TEST(ScaleInSync, IdentityAtOne) { EXPECT_EQ(scale_in_sync(dot_spec(7, 2), 1.0), dot_spec(7, 2)); }

TEST(ScaleInSync, LineKeepsInkRatio) {
    const auto base = line_spec(10, 1);
    const auto scaled = scale_in_sync(base, 2.0);
    EXPECT_DOUBLE_EQ(scaled.size, 2.0);
    EXPECT_DOUBLE_EQ(scaled.pitch(), 20.0);
    EXPECT_NEAR(ink_ratio(scaled, 4), 0.10, 0.02);
    EXPECT_NEAR(ink_ratio(base, 4), 0.10, 0.02);
}

TEST(ScaleInSync, DotKeepsInkRatio) {
    const auto base = dot_spec(10, 2);
    const auto scaled = scale_in_sync(base, 3.0);
    EXPECT_DOUBLE_EQ(scaled.size, 6.0);
    EXPECT_NEAR(scaled.pitch(), 30.0, 1e-12);
    const double analytic = M_PI * 4.0 / 100.0;
    EXPECT_NEAR(ink_ratio(base, 4), analytic, 0.02);
    EXPECT_NEAR(ink_ratio(scaled, 4), ink_ratio(base, 4), 0.02);
}

TEST(ScaleInSync, RejectsBadFactors) {
    EXPECT_THROW(scale_in_sync(line_spec(10, 1), 0.0), Error);
    EXPECT_THROW(scale_in_sync(line_spec(10, 1), -2.0), Error);
    // Scaling keeps pitch/size fixed; only the density ceiling can be crossed.
    EXPECT_THROW(scale_in_sync(line_spec(150, 0.5), 0.5), Error);
}

TEST(SwapParameters, IconsKeepTheirArtwork) {
    auto carrot = icon_spec("carrot", 8, 10);
    auto tomato = icon_spec("tomato", 3, 14);
    tomato.orientation_deg = 45;
    const auto [a, b] = swap_parameters(carrot, tomato);
    EXPECT_EQ(std::get<IconPrimitive>(a.primitive).glyph_id, "carrot");
    EXPECT_EQ(std::get<IconPrimitive>(b.primitive).glyph_id, "tomato");
    EXPECT_DOUBLE_EQ(a.density, 3);
    EXPECT_DOUBLE_EQ(b.density, 8);
    EXPECT_DOUBLE_EQ(a.orientation_deg, 45);
    EXPECT_DOUBLE_EQ(a.size, 14);
}

TEST(SwapParameters, GeometricIconicSwapChangesKind) {
    auto carrot = icon_spec("carrot", 8, 10);
    auto lines = line_spec(12, 1);
    const auto [a, b] = swap_parameters(carrot, lines);
    EXPECT_TRUE(std::holds_alternative<LinePrimitive>(a.primitive));
    EXPECT_TRUE(std::holds_alternative<IconPrimitive>(b.primitive));
}

TEST(SwapParameters, IsAnInvolution) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(1.0, 20.0);
    for (int k = 0; k < 100; ++k) {
        TextureSpec a = icon_spec(std::string(kGlyphBases[k % 7]), u(rng), u(rng) / 4);
        TextureSpec b = k % 3 == 0 ? line_spec(u(rng), 0.5) : icon_spec(std::string(kGlyphBases[(k + 3) % 7]), u(rng), 2);
        b.orientation_deg = u(rng);
        const auto [x, y] = swap_parameters(a, b);
        const auto [p, q] = swap_parameters(x, y);
        EXPECT_EQ(p, a);
        EXPECT_EQ(q, b);
        const auto [s, t] = swap_parameters(a, a);
        EXPECT_EQ(s, a);
        EXPECT_EQ(t, a);
    }
}

TEST(Lint, FortyFiveDegreesApartIsFine) {
    const auto r = lint_texture_set({line_spec(10, 1, 0), line_spec(10, 1, 45)});
    EXPECT_EQ(r.count(kOrientationTooClose), 0u);
}

TEST(Lint, SpacingRatioAboveTwoIsFine) {
    const auto r = lint_texture_set({line_spec(10, 1, 0), line_spec(4, 1, 10)});
    EXPECT_TRUE(r.clean());
}

TEST(Lint, IdenticalSpecsRaiseBothRules) {
    const auto r = lint_texture_set({dot_spec(8, 2), dot_spec(8, 2)});
    EXPECT_EQ(r.count(kOrientationTooClose), 1u);
    EXPECT_EQ(r.count(kInkTooClose), 1u);
    EXPECT_EQ(r.findings[0].rule_id, kOrientationTooClose);
}

TEST(Lint, LinesUseHalfTurnSymmetry) {
    // 5° and 175° are 10° apart for stripes.
    EXPECT_EQ(lint_texture_set({line_spec(10, 1, 5), line_spec(12, 3, 175)}).count(kOrientationTooClose), 1u);
    // but 170° apart for dots, which only repeat every full turn.
    auto a = dot_spec(10, 1);
    auto b = dot_spec(12, 1);
    a.orientation_deg = 5;
    b.orientation_deg = 175;
    EXPECT_EQ(lint_texture_set({a, b}).count(kOrientationTooClose), 0u);
}

TEST(Lint, DifferentKindsAreNotCompared) {
    EXPECT_TRUE(lint_texture_set({line_spec(10, 1), dot_spec(10, 1)}).clean());
}

TEST(TextureJson, RoundTripIsBitExact) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        TextureSpec s;
        switch (k % 4) {
        case 0: s.primitive = DotPrimitive{k % 8 == 0}; break;
        case 1: s.primitive = LinePrimitive{}; break;
        case 2: s.primitive = GridPrimitive{1 + 178 * u(rng)}; break;
        default: s.primitive = IconPrimitive{std::string(kGlyphBases[k % 7]), kIconStyles[k % 4]};
        }
        s.density = 1 + 29 * u(rng);
        s.size = 0.25 + 19.75 * u(rng);
        s.orientation_deg = 360 * u(rng);
        s.primitive_rotation_deg = 360 * u(rng);
        s.background = k % 2 ? Background::Black : Background::White;
        s.randomness = u(rng);
        s.phase = {u(rng) * 50 - 25, u(rng) * 1e-7};
        s.seed = rng();
        const auto back = texture_from_json(Json::parse(to_json(s).dump()));
        EXPECT_EQ(back, s);
        EXPECT_EQ(std::memcmp(&back.density, &s.density, sizeof(double)), 0);
    }
}

TEST(TextureJson, RejectsUnknownKeys) {
    auto j = to_json(line_spec(10, 1));
    j["colour"] = "red";
    EXPECT_THROW(texture_from_json(j), Error);
    auto p = to_json(line_spec(10, 1));
    p["primitive"]["filled"] = true;
    EXPECT_THROW(texture_from_json(p), Error);
    auto bg = to_json(line_spec(10, 1));
    bg["background"] = "grey";
    EXPECT_THROW(texture_from_json(bg), Error);
}
