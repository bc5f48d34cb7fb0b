#include "bwtex/session.hpp"

#include "support/action_gen.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <thread>

using namespace bwtex;

namespace {

EditSession geometric_bar(const std::string& set = "bertin-4") {
    return EditSession::from_preset("t", set, ChartKind::Bar);
}

const TextureSpec& texture_of(const EditSession& s, std::string_view name) {
    return std::get<TextureSpec>(s.state().chart.find(name)->fill);
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error raised";
    return ErrorCode::IoError;
}

} // namespace

TEST(EditSession, ForAllDensityReachesEveryGridOnly) {
    auto s = geometric_bar();
    std::vector<std::string> grids, others;
    for (const auto& c : s.state().chart.categories)
        (std::holds_alternative<GridPrimitive>(std::get<TextureSpec>(c.fill).primitive) ? grids : others)
            .push_back(c.name);
    ASSERT_EQ(grids.size(), 3u);
    const auto before = s.state();
    s.apply(SelectCategory{grids[1]});
    s.apply(SetProperty{"density", 12, true});
    for (const auto& g : grids) EXPECT_EQ(texture_of(s, g).density, 12.0) << g;
    for (const auto& o : others) EXPECT_EQ(texture_of(s, o), std::get<TextureSpec>(before.chart.find(o)->fill)) << o;
    EXPECT_EQ(s.history_size(), 2u);
}

TEST(EditSession, ForAllOnIconsReachesAllSeven) {
    auto s = EditSession::from_preset("t", "PI1-like", std::nullopt);
    s.apply(SelectCategory{"corn"});
    s.apply(SetProperty{"size", 11, true});
    for (const auto v : kVegetables) EXPECT_EQ(texture_of(s, v).size, 11.0);
}

TEST(EditSession, WithoutForAllOnlySelectedChanges) {
    auto s = geometric_bar();
    s.apply(SelectCategory{"celery"});
    const auto before = s.state();
    s.apply(SetProperty{"orientation_deg", 30, false});
    for (const auto& c : s.state().chart.categories) {
        if (c.name == "celery") EXPECT_EQ(std::get<TextureSpec>(c.fill).orientation_deg, 30.0);
        else EXPECT_EQ(c, *before.chart.find(c.name));
    }
}

TEST(EditSession, ResetRestoresInitialBytes) {
    auto s = EditSession::from_preset("t", "PG1-like", std::nullopt);
    const auto initial = s.export_json().dump();
    std::mt19937_64 g(5);
    for (int k = 0; k < 40; ++k) {
        try {
            s.apply(actiongen::random_action(g));
        } catch (const Error&) {
        }
    }
    s.apply(Reset{});
    EXPECT_EQ(s.export_json().dump(), initial);
    EXPECT_TRUE(s.can_undo());
}

TEST(EditSession, TenActionsThenTenUndosIsIdentity) {
    std::mt19937_64 g(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto s = EditSession::from_preset("t", trial % 2 ? "BG2-like" : "PI1-like", std::nullopt);
        const auto initial = s.export_json().dump();
        int applied = 0;
        while (applied < 10) {
            try {
                s.apply(actiongen::random_action(g));
                ++applied;
            } catch (const Error&) {
            }
        }
        std::vector<std::string> forward;
        for (int k = 0; k < 10; ++k) {
            forward.push_back(s.export_json().dump());
            s.undo();
        }
        EXPECT_EQ(s.export_json().dump(), initial);
        for (int k = 9; k >= 0; --k) {
            s.redo();
            EXPECT_EQ(s.export_json().dump(), forward[static_cast<std::size_t>(k)]);
        }
    }
}

TEST(EditSession, NewActionClearsRedo) {
    auto s = geometric_bar();
    s.apply(SelectCategory{"corn"});
    s.apply(SetProperty{"size", 1, false});
    s.undo();
    EXPECT_TRUE(s.can_redo());
    s.apply(SelectCategory{"olives"});
    EXPECT_FALSE(s.can_redo());
    EXPECT_EQ(code_of([&] { s.redo(); }), ErrorCode::InvalidAction);
}

TEST(EditSession, HistoryKeepsNewest256) {
    auto s = geometric_bar();
    for (int k = 0; k < 300; ++k) s.apply(SelectCategory{std::string(kVegetables[static_cast<std::size_t>(k % 7)])});
    EXPECT_EQ(s.history_size(), kHistoryLimit);
    for (std::size_t k = 0; k < kHistoryLimit; ++k) s.undo();
    EXPECT_FALSE(s.can_undo());
    EXPECT_EQ(s.state().selected, std::string(kVegetables[(300 - 256 - 1) % 7]));
}

TEST(EditSession, ErrorsLeaveStateAndHistoryUntouched) {
    auto s = geometric_bar();
    const auto before = s.export_json();
    EXPECT_EQ(code_of([&] { s.apply(SelectCategory{"okra"}); }), ErrorCode::UnknownCategory);
    EXPECT_EQ(code_of([&] { s.apply(SetProperty{"density", 5, false}); }), ErrorCode::InvalidProperty);
    s.apply(SelectCategory{"corn"});
    EXPECT_EQ(code_of([&] { s.apply(SetProperty{"density", -1, false}); }), ErrorCode::InvalidProperty);
    EXPECT_EQ(code_of([&] { s.apply(SetProperty{"nonsense", 1, false}); }), ErrorCode::InvalidProperty);
    EXPECT_EQ(code_of([&] { s.apply(SetProperty{"halo_width", 2, false}); }), ErrorCode::InvalidProperty);
    EXPECT_EQ(code_of([&] { s.apply(SwapTextures{"corn", "okra"}); }), ErrorCode::UnknownCategory);
    EXPECT_EQ(code_of([&] { s.apply(LoadPreset{"nope"}); }), ErrorCode::InvalidAction);
    EXPECT_EQ(s.history_size(), 1u);
    s.undo();
    EXPECT_EQ(s.export_json(), before);
    EXPECT_EQ(code_of([&] { s.undo(); }), ErrorCode::InvalidAction);
}

TEST(EditSession, EightQuarterTurnsReturnToStart) {
    auto s = geometric_bar("bertin-2");
    s.apply(SelectCategory{"carrots"});
    const double start = texture_of(s, "carrots").orientation_deg;
    for (int k = 0; k < 8; ++k) {
        s.apply(SetProperty{"rotate_step", 1, false});
        EXPECT_EQ(std::fmod(texture_of(s, "carrots").orientation_deg, 45.0), 0.0);
    }
    EXPECT_EQ(texture_of(s, "carrots").orientation_deg, start);
}

TEST(EditSession, RotateStepSnapsToMultiplesOf45) {
    EXPECT_EQ(session_detail::rotate_steps(30, 1), 45.0);
    EXPECT_EQ(session_detail::rotate_steps(30, -1), 0.0);
    EXPECT_EQ(session_detail::rotate_steps(0, -1), 315.0);
    EXPECT_EQ(session_detail::rotate_steps(315, 1), 0.0);
    EXPECT_EQ(session_detail::rotate_steps(90, 2), 180.0);
}

TEST(EditSession, SwapOnIconicPieKeepsGlyphs) {
    auto s = EditSession::from_preset("t", "PI1-like", std::nullopt);
    s.apply(SelectCategory{"mushrooms"});
    s.apply(SetProperty{"density", 5, false});
    s.apply(SetProperty{"primitive_rotation_deg", 30, false});
    const auto carrot = texture_of(s, "carrots");
    const auto mushroom = texture_of(s, "mushrooms");
    s.apply(SwapTextures{"carrots", "mushrooms"});
    const auto& c = texture_of(s, "carrots");
    const auto& m = texture_of(s, "mushrooms");
    EXPECT_EQ(std::get<IconPrimitive>(c.primitive).glyph_id, "carrot");
    EXPECT_EQ(std::get<IconPrimitive>(m.primitive).glyph_id, "mushroom");
    EXPECT_EQ(c.density, mushroom.density);
    EXPECT_EQ(c.primitive_rotation_deg, mushroom.primitive_rotation_deg);
    EXPECT_EQ(m.primitive_rotation_deg, carrot.primitive_rotation_deg);
    EXPECT_EQ(m.size, carrot.size);
    EXPECT_EQ(c.density, 5.0);
    EXPECT_EQ(m.density, carrot.density);
    EXPECT_NE(c, carrot);
}

TEST(EditSession, LoadPresetAndRandomDataset) {
    auto s = geometric_bar();
    s.apply(LoadPreset{"bertin-1"});
    EXPECT_EQ(s.state().chart.categories, PresetLibrary::builtin().chart_from_set("bertin-1", ChartKind::Bar).categories);
    s.apply(LoadPreset{"PI1-like"});
    EXPECT_EQ(s.state().chart, PresetLibrary::builtin().winner("PI1-like").chart);
    s.apply(RandomDataset{3});
    EXPECT_EQ(s.state().data, generate_datasets(3).front().as_dataset());
}

TEST(EditSession, SelectionDrawsBlueDotInSvg) {
    auto s = geometric_bar();
    EXPECT_EQ(s.svg().find("selection-mark"), std::string::npos);
    s.apply(SelectCategory{"olives"});
    EXPECT_NE(s.svg().find("selection-mark"), std::string::npos);
    EXPECT_EQ(s.summary().at("state").at("selected"), "olives");
}

TEST(EditActionJson, RoundTripsAndRejectsMalformed) {
    std::mt19937_64 g(2);
    for (int k = 0; k < 200; ++k) {
        const auto a = actiongen::random_action(g);
        EXPECT_EQ(to_json(action_from_json(to_json(a))), to_json(a));
    }
    for (const char* bad : {R"([])", R"({"type":"fly"})", R"({"type":"swap_textures","a":"corn"})",
                            R"({"type":"reset","extra":1})", R"({"type":"random_dataset","seed":-3})",
                            R"({"type":"set_property","path":"size"})"})
        EXPECT_EQ(code_of([&] { action_from_json(Json::parse(bad)); }), ErrorCode::InvalidAction) << bad;
}

TEST(SessionStateJson, RoundTrips) {
    auto s = EditSession::from_preset("t", "PG1-like", std::nullopt);
    s.apply(SelectCategory{"corn"});
    EXPECT_EQ(session_state_from_json(s.export_json()), s.state());
}

TEST(SessionStore, UnknownSessionIsNotFound) {
    SessionStore store;
    EXPECT_EQ(code_of([&] { store.with("missing", [](EditSession&) { return 0; }); }), ErrorCode::SessionNotFound);
}

TEST(SessionStore, IdleSessionsExpire) {
    auto now = SessionStore::Clock::time_point{};
    SessionStore store(std::chrono::minutes(30), [&] { return now; });
    const auto a = store.create("BG2-like", std::nullopt);
    now += std::chrono::minutes(20);
    const auto b = store.create("PG1-like", std::nullopt);
    EXPECT_EQ(store.size(), 2u);
    now += std::chrono::minutes(15);
    EXPECT_EQ(store.size(), 1u);
    EXPECT_EQ(code_of([&] { store.with(a, [](EditSession&) { return 0; }); }), ErrorCode::SessionNotFound);
    EXPECT_NO_THROW(store.with(b, [](EditSession&) { return 0; }));
}

TEST(SessionStore, ConcurrentSessionsStayIndependent) {
    SessionStore store;
    constexpr int kThreads = 4, kSteps = 200;
    std::vector<std::string> ids;
    for (int t = 0; t < kThreads; ++t) ids.push_back(store.create("bertin-2", ChartKind::Bar));
    std::atomic<int> failures{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < kThreads; ++t) {
        pool.emplace_back([&, t] {
            const std::string veg(kVegetables[static_cast<std::size_t>(t)]);
            for (int k = 0; k < kSteps; ++k) {
                store.with(ids[static_cast<std::size_t>(t)], [&](EditSession& s) {
                    s.apply(SelectCategory{veg});
                    s.apply(SetProperty{"seed", t * 10000 + k, false});
                    if (texture_of(s, veg).seed != static_cast<std::uint64_t>(t * 10000 + k)) ++failures;
                    return 0;
                });
            }
        });
    }
    for (auto& th : pool) th.join();
    EXPECT_EQ(failures.load(), 0);
    for (int t = 0; t < kThreads; ++t)
        store.with(ids[static_cast<std::size_t>(t)], [&](EditSession& s) {
            EXPECT_EQ(texture_of(s, kVegetables[static_cast<std::size_t>(t)]).seed,
                      static_cast<std::uint64_t>(t * 10000 + kSteps - 1));
            EXPECT_EQ(s.history_size(), kHistoryLimit);
            return 0;
        });
}
