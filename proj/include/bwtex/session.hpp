#pragma once

// Undoable chart-editing sessions and a thread-safe store that expires idle ones.

#include "bwtex/chart.hpp"
#include "bwtex/json.hpp"
#include "bwtex/presets.hpp"
#include "bwtex/rng.hpp"
#include "bwtex/study.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace bwtex {

inline constexpr std::size_t kHistoryLimit = 256;
inline constexpr double kRotationStepDeg = 45.0;

struct SessionState {
    ChartSpec chart;
    Dataset data;
    std::optional<std::string> selected;

    bool operator==(const SessionState&) const = default;
};

inline Json to_json(const SessionState& s) {
    return Json{{"chart", to_json(s.chart)},
                {"data", to_json(s.data)},
                {"selected", s.selected ? Json(*s.selected) : Json(nullptr)}};
}

inline SessionState session_state_from_json(const Json& j) {
    json_detail::require_object(j, "session");
    json_detail::reject_unknown(j, {"chart", "data", "selected"}, "session");
    SessionState s;
    s.chart = chart_from_json(json_detail::required(j, "chart", "session"));
    s.data = dataset_from_json(json_detail::required(j, "data", "session"));
    if (j.contains("selected") && !j["selected"].is_null()) s.selected = json_detail::string(j, "selected", "session");
    return s;
}

// --- actions ------------------------------------------------------------------

namespace session_detail {

inline bool is_count(const Json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

} // namespace session_detail

struct SelectCategory {
    std::optional<std::string> category;  // empty clears the selection
};

/// Texture paths: density, size, orientation_deg, primitive_rotation_deg,
/// randomness, background, phase, seed, filled, crossing_angle_deg, fill,
/// gray_level and rotate_step (value = signed count of 45° steps).
/// Chart paths: outline_width, halo_width, legend.
struct SetProperty {
    std::string path;
    Json value;
    bool for_all = false;
};

struct SwapTextures {
    std::string a;
    std::string b;
};

struct LoadPreset {
    std::string id;
};

struct RandomDataset {
    std::uint64_t seed = 0;
};

struct Reset {};

using EditAction = std::variant<SelectCategory, SetProperty, SwapTextures, LoadPreset, RandomDataset, Reset>;

inline std::string_view action_name(const EditAction& a) {
    static constexpr std::string_view kNames[] = {"select_category", "set_property", "swap_textures",
                                                  "load_preset",     "random_dataset", "reset"};
    return kNames[a.index()];
}

inline Json to_json(const EditAction& action) {
    Json j{{"type", std::string(action_name(action))}};
    std::visit(
        [&](const auto& a) {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, SelectCategory>) {
                j["category"] = a.category ? Json(*a.category) : Json(nullptr);
            } else if constexpr (std::is_same_v<T, SetProperty>) {
                j["path"] = a.path;
                j["value"] = a.value;
                j["for_all"] = a.for_all;
            } else if constexpr (std::is_same_v<T, SwapTextures>) {
                j["a"] = a.a;
                j["b"] = a.b;
            } else if constexpr (std::is_same_v<T, LoadPreset>) {
                j["id"] = a.id;
            } else if constexpr (std::is_same_v<T, RandomDataset>) {
                j["seed"] = a.seed;
            }
        },
        action);
    return j;
}

/// Parses an action body; any shape problem is InvalidAction.
inline EditAction action_from_json(const Json& j) {
    const auto bad = [](const std::string& m) -> void { fail(ErrorCode::InvalidAction, m); };
    if (!j.is_object()) bad("action must be a JSON object");
    if (!j.contains("type") || !j["type"].is_string()) bad("action needs a string 'type'");
    const auto type = j["type"].get<std::string>();
    const auto str = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_string()) bad(type + " needs a string '" + key + "'");
        return j[key].get<std::string>();
    };
    const auto only = [&](std::initializer_list<std::string_view> keys) {
        for (const auto& [k, v] : j.items())
            if (k != "type" && std::find(keys.begin(), keys.end(), k) == keys.end())
                bad("unexpected key '" + k + "' in " + type);
    };
    if (type == "select_category") {
        only({"category"});
        if (!j.contains("category") || j["category"].is_null()) return SelectCategory{};
        return SelectCategory{str("category")};
    }
    if (type == "set_property") {
        only({"path", "value", "for_all"});
        if (!j.contains("value")) bad("set_property needs a 'value'");
        bool for_all = false;
        if (j.contains("for_all")) {
            if (!j["for_all"].is_boolean()) bad("for_all must be a boolean");
            for_all = j["for_all"].get<bool>();
        }
        return SetProperty{str("path"), j["value"], for_all};
    }
    if (type == "swap_textures") {
        only({"a", "b"});
        return SwapTextures{str("a"), str("b")};
    }
    if (type == "load_preset") {
        only({"id"});
        return LoadPreset{str("id")};
    }
    if (type == "random_dataset") {
        only({"seed"});
        if (!j.contains("seed") || !session_detail::is_count(j["seed"])) bad("random_dataset needs a non-negative 'seed'");
        return RandomDataset{j["seed"].get<std::uint64_t>()};
    }
    if (type == "reset") {
        only({});
        return Reset{};
    }
    fail(ErrorCode::InvalidAction, "unknown action type '" + type + "'");
}

// --- session ------------------------------------------------------------------

namespace session_detail {

inline double number_value(const Json& v, std::string_view path) {
    if (!v.is_number()) fail(ErrorCode::InvalidProperty, std::string(path) + " needs a number");
    return v.get<double>();
}

/// Next multiple of 45° in the direction of `steps`, wrapped into [0, 360).
inline double rotate_steps(double deg, long steps) {
    const double q = deg / kRotationStepDeg;
    double k = steps > 0 ? std::floor(q + 1e-9) + static_cast<double>(steps)
                         : std::ceil(q - 1e-9) + static_cast<double>(steps);
    if (steps == 0) k = std::round(q);
    double out = std::fmod(k * kRotationStepDeg, 360.0);
    if (out < 0) out += 360.0;
    return out == 360.0 ? 0.0 : out;
}

inline void set_texture_property(TextureSpec& t, std::string_view path, const Json& v) {
    if (path == "density") t.density = number_value(v, path);
    else if (path == "size") t.size = number_value(v, path);
    else if (path == "orientation_deg") t.orientation_deg = number_value(v, path);
    else if (path == "primitive_rotation_deg") t.primitive_rotation_deg = number_value(v, path);
    else if (path == "randomness") t.randomness = number_value(v, path);
    else if (path == "rotate_step") {
        if (!v.is_number_integer()) fail(ErrorCode::InvalidProperty, "rotate_step needs an integer");
        t.orientation_deg = rotate_steps(t.orientation_deg, v.get<long>());
    } else if (path == "background") {
        if (v != "white" && v != "black") fail(ErrorCode::InvalidProperty, "background must be white|black");
        t.background = v == "white" ? Background::White : Background::Black;
    } else if (path == "phase") {
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            fail(ErrorCode::InvalidProperty, "phase must be [dx, dy]");
        t.phase = {v[0].get<double>(), v[1].get<double>()};
    } else if (path == "seed") {
        if (!is_count(v)) fail(ErrorCode::InvalidProperty, "seed must be a non-negative integer");
        t.seed = v.get<std::uint64_t>();
    } else if (path == "filled") {
        auto* d = std::get_if<DotPrimitive>(&t.primitive);
        if (!d || !v.is_boolean()) fail(ErrorCode::InvalidProperty, "filled applies to dots and needs a boolean");
        d->filled = v.get<bool>();
    } else if (path == "crossing_angle_deg") {
        auto* g = std::get_if<GridPrimitive>(&t.primitive);
        if (!g) fail(ErrorCode::InvalidProperty, "crossing_angle_deg applies to grids");
        g->crossing_angle_deg = number_value(v, path);
    } else {
        fail(ErrorCode::InvalidProperty, "unknown property '" + std::string(path) + "'");
    }
}

inline bool same_scope(const TextureSpec& reference, const FillStyle& other) {
    const auto* t = std::get_if<TextureSpec>(&other);
    if (!t) return false;
    if (is_icon(reference.primitive)) return is_icon(t->primitive);
    return reference.primitive.index() == t->primitive.index();
}

} // namespace session_detail

class EditSession {
public:
    EditSession(std::string id, SessionState initial, const PresetLibrary& lib = PresetLibrary::builtin())
        : id_(std::move(id)), initial_(std::move(initial)), state_(initial_), lib_(&lib) {
        check(state_);
    }

    /// New session on `preset` (a winner id, a set id or "unicolor") with the default dataset.
    static EditSession from_preset(std::string id, std::string_view preset, std::optional<ChartKind> kind,
                                   const PresetLibrary& lib = PresetLibrary::builtin()) {
        SessionState s;
        s.data = lib.default_dataset;
        s.chart = preset_chart(lib, preset, kind);
        return EditSession(std::move(id), std::move(s), lib);
    }

    const std::string& id() const { return id_; }
    const SessionState& state() const { return state_; }
    const SessionState& initial() const { return initial_; }
    bool can_undo() const { return !undo_.empty(); }
    bool can_redo() const { return !redo_.empty(); }
    std::size_t history_size() const { return undo_.size(); }
    std::size_t redo_size() const { return redo_.size(); }

    /// Applies `action`; on error the session is left untouched.
    void apply(const EditAction& action) {
        SessionState next = std::visit([&](const auto& a) { return step(a); }, action);
        check(next);
        undo_.push_back({action, std::move(state_)});
        if (undo_.size() > kHistoryLimit) undo_.pop_front();
        redo_.clear();
        state_ = std::move(next);
    }

    void undo() {
        if (undo_.empty()) fail(ErrorCode::InvalidAction, "nothing to undo");
        auto e = std::move(undo_.back());
        undo_.pop_back();
        redo_.push_back({e.action, std::move(state_)});
        state_ = std::move(e.state);
    }

    void redo() {
        if (redo_.empty()) fail(ErrorCode::InvalidAction, "nothing to redo");
        auto e = std::move(redo_.back());
        redo_.pop_back();
        undo_.push_back({e.action, std::move(state_)});
        state_ = std::move(e.state);
    }

    Scene scene() const {
        RenderOptions opts;
        opts.selected = state_.selected;
        opts.glyphs = &lib_->glyphs;
        return build_chart_scene(state_.chart, state_.data, opts);
    }

    std::string svg() const { return to_svg(scene()); }

    Json export_json() const { return to_json(state_); }

    Json summary() const {
        Json hist = Json::array();
        for (const auto& e : undo_) hist.push_back(std::string(action_name(e.action)));
        return Json{{"session_id", id_},
                    {"state", to_json(state_)},
                    {"can_undo", can_undo()},
                    {"can_redo", can_redo()},
                    {"history", std::move(hist)},
                    {"warnings", scene().warnings}};
    }

private:
    struct Entry {
        EditAction action;
        SessionState state;  // the state on the other side of this action
    };

    static ChartSpec preset_chart(const PresetLibrary& lib, std::string_view preset, std::optional<ChartKind> kind) {
        for (const auto& w : lib.winners)
            if (w.id == preset) {
                if (kind && *kind != w.chart.kind)
                    fail(ErrorCode::InvalidAction, w.id + " is a " + std::string(to_string(w.chart.kind)) + " preset");
                return w.chart;
            }
        if (preset != "unicolor" && !lib.find_set(preset))
            fail(ErrorCode::InvalidAction, "unknown preset '" + std::string(preset) + "'");
        return lib.chart_from_set(preset, kind.value_or(ChartKind::Bar));
    }

    void check(const SessionState& s) const {
        try {
            validate_chart(s.chart, lib_->glyphs);
            for (const auto& c : s.chart.categories)
                if (const auto* t = std::get_if<TextureSpec>(&c.fill)) validate(*t, lib_->glyphs);
            validate_dataset(s.chart, s.data);
        } catch (const Error& e) {
            if (e.code() == ErrorCode::InvalidAction) throw;
            fail(ErrorCode::InvalidProperty, e.what());
        }
        if (s.selected && !s.chart.find(*s.selected)) fail(ErrorCode::UnknownCategory, *s.selected);
    }

    Category& category(SessionState& s, const std::string& name) const {
        for (auto& c : s.chart.categories)
            if (c.name == name) return c;
        fail(ErrorCode::UnknownCategory, "no category '" + name + "'");
    }

    SessionState step(const SelectCategory& a) const {
        SessionState s = state_;
        if (a.category) category(s, *a.category);
        s.selected = a.category;
        return s;
    }

    SessionState step(const SetProperty& a) const {
        using namespace session_detail;
        SessionState s = state_;
        auto& chart = s.chart;
        if (a.path == "outline_width") {
            chart.outline_width = number_value(a.value, a.path);
            return s;
        }
        if (a.path == "halo_width") {
            chart.halo_width = number_value(a.value, a.path);
            return s;
        }
        if (a.path == "legend") {
            if (a.value == "right") chart.legend = LegendPlacement::Right;
            else if (a.value == "bottom") chart.legend = LegendPlacement::Bottom;
            else if (a.value == "none") chart.legend = LegendPlacement::None;
            else fail(ErrorCode::InvalidProperty, "legend must be right|bottom|none");
            return s;
        }
        if (!s.selected) fail(ErrorCode::InvalidProperty, a.path + " needs a selected category");
        Category& target = category(s, *s.selected);
        if (a.path == "fill") {
            FillStyle fill;
            try {
                fill = fill_from_json(a.value);
            } catch (const Error& e) {
                fail(ErrorCode::InvalidProperty, e.what());
            }
            if (a.for_all) {
                for (auto& c : chart.categories) c.fill = fill;
            } else {
                target.fill = fill;
            }
            return s;
        }
        if (a.path == "gray_level") {
            const double g = number_value(a.value, a.path);
            if (!std::holds_alternative<Unicolor>(target.fill))
                fail(ErrorCode::InvalidProperty, "gray_level applies to unicolor fills");
            for (auto& c : chart.categories)
                if (&c == &target || (a.for_all && std::holds_alternative<Unicolor>(c.fill)))
                    std::get<Unicolor>(c.fill).gray_level = g;
            return s;
        }
        const auto* ref = std::get_if<TextureSpec>(&target.fill);
        if (!ref) fail(ErrorCode::InvalidProperty, a.path + " applies to textured fills");
        const TextureSpec reference = *ref;
        for (auto& c : chart.categories) {
            if (&c != &target && !(a.for_all && same_scope(reference, c.fill))) continue;
            set_texture_property(std::get<TextureSpec>(c.fill), a.path, a.value);
        }
        return s;
    }

    SessionState step(const SwapTextures& a) const {
        SessionState s = state_;
        Category& x = category(s, a.a);
        Category& y = category(s, a.b);
        const auto* tx = std::get_if<TextureSpec>(&x.fill);
        const auto* ty = std::get_if<TextureSpec>(&y.fill);
        if (tx && ty) {
            auto [nx, ny] = swap_parameters(*tx, *ty);
            x.fill = std::move(nx);
            y.fill = std::move(ny);
        } else {
            std::swap(x.fill, y.fill);
        }
        return s;
    }

    /// Winner ids replace the whole chart; set ids refill the current chart.
    SessionState step(const LoadPreset& a) const {
        SessionState s = state_;
        if (lib_->find_set(a.id) || a.id == "unicolor") {
            s.chart.categories = preset_chart(*lib_, a.id, s.chart.kind).categories;
        } else {
            s.chart = preset_chart(*lib_, a.id, std::nullopt);
        }
        if (s.selected && !s.chart.find(*s.selected)) s.selected.reset();
        return s;
    }

    SessionState step(const RandomDataset& a) const {
        SessionState s = state_;
        s.data = generate_datasets(a.seed).front().as_dataset();
        return s;
    }

    SessionState step(const Reset&) const { return initial_; }

    std::string id_;
    SessionState initial_;
    SessionState state_;
    const PresetLibrary* lib_;
    std::deque<Entry> undo_;
    std::vector<Entry> redo_;
};

// --- store --------------------------------------------------------------------

/// Sessions keyed by id. Each session has its own mutex so actions on one
/// session are serialized while different sessions proceed independently.
class SessionStore {
public:
    using Clock = std::chrono::steady_clock;

    explicit SessionStore(std::chrono::seconds idle_expiry = std::chrono::minutes(30),
                          std::function<Clock::time_point()> now = Clock::now,
                          const PresetLibrary& lib = PresetLibrary::builtin())
        : expiry_(idle_expiry), now_(std::move(now)), lib_(&lib), ids_(std::random_device{}()) {}

    std::string create(std::string_view preset, std::optional<ChartKind> kind) {
        std::string id;
        {
            std::lock_guard lock(mu_);
            id = next_id();
        }
        auto slot = std::make_shared<Slot>(EditSession::from_preset(id, preset, kind, *lib_), now_());
        std::lock_guard lock(mu_);
        purge_locked();
        slots_.emplace(id, std::move(slot));
        return id;
    }

    /// Runs `fn` with exclusive access to the session; SessionNotFound when absent or expired.
    template <typename F>
    auto with(const std::string& id, F&& fn) -> decltype(fn(std::declval<EditSession&>())) {
        std::shared_ptr<Slot> slot;
        {
            std::lock_guard lock(mu_);
            purge_locked();
            const auto it = slots_.find(id);
            if (it == slots_.end()) fail(ErrorCode::SessionNotFound, "no session '" + id + "'");
            slot = it->second;
        }
        std::lock_guard lock(slot->mu);
        slot->last_used = now_();
        return fn(slot->session);
    }

    bool erase(const std::string& id) {
        std::lock_guard lock(mu_);
        return slots_.erase(id) > 0;
    }

    std::size_t size() {
        std::lock_guard lock(mu_);
        purge_locked();
        return slots_.size();
    }

private:
    struct Slot {
        Slot(EditSession s, Clock::time_point t) : session(std::move(s)), last_used(t) {}
        std::mutex mu;
        EditSession session;
        Clock::time_point last_used;
    };

    std::string next_id() {
        static constexpr char kHex[] = "0123456789abcdef";
        std::string id = "s";
        std::uint64_t v = ids_();
        for (int k = 0; k < 16; ++k, v >>= 4) id += kHex[v & 15];
        return id;
    }

    void purge_locked() {
        const auto t = now_();
        std::erase_if(slots_, [&](const auto& kv) {
            std::unique_lock lock(kv.second->mu, std::try_to_lock);
            return lock.owns_lock() && t - kv.second->last_used > expiry_;
        });
    }

    std::chrono::seconds expiry_;
    std::function<Clock::time_point()> now_;
    const PresetLibrary* lib_;
    std::mutex mu_;
    SplitMix64 ids_;
    std::map<std::string, std::shared_ptr<Slot>> slots_;
};

} // namespace bwtex
