#pragma once

// Comparison-task study: datasets, trial schedules, stimuli, log formats,
// log validation and the reference trial runner.

#include "bwtex/chart.hpp"
#include "bwtex/csv.hpp"
#include "bwtex/glyphs.hpp"
#include "bwtex/json.hpp"
#include "bwtex/presets.hpp"
#include "bwtex/rng.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace bwtex {

enum class Question { More, Fewer };
enum class FillType { Geometric, Iconic, Unicolor };
enum class Answer { Left, Right, None };

inline std::string_view to_string(Question q) { return q == Question::More ? "MORE" : "FEWER"; }
inline std::string_view to_string(FillType f) {
    switch (f) {
    case FillType::Geometric: return "geometric";
    case FillType::Iconic: return "iconic";
    case FillType::Unicolor: return "unicolor";
    }
    return "geometric";
}
inline std::string_view to_string(Answer a) {
    switch (a) {
    case Answer::Left: return "left";
    case Answer::Right: return "right";
    case Answer::None: return "none";
    }
    return "none";
}

inline constexpr std::array<Question, 2> kQuestions{Question::More, Question::Fewer};
inline constexpr std::array<FillType, 3> kFillTypes{FillType::Geometric, FillType::Iconic, FillType::Unicolor};
inline constexpr int kDatasetCount = 10;
inline constexpr int kTrialCount = 60;
inline constexpr int kMinValue = 5;
inline constexpr int kMaxValue = 95;
inline constexpr double kMinTargetGap = 5.0;

template <typename E, std::size_t N>
E parse_enum(std::string_view text, const std::array<E, N>& values, std::string_view what) {
    for (E v : values)
        if (to_string(v) == text) return v;
    fail(ErrorCode::ParseError, "unknown " + std::string(what) + " '" + std::string(text) + "'");
}

inline Question parse_question(std::string_view s) { return parse_enum(s, kQuestions, "question"); }
inline FillType parse_fill(std::string_view s) { return parse_enum(s, kFillTypes, "fill"); }
inline Answer parse_answer(std::string_view s) {
    return parse_enum(s, std::array{Answer::Left, Answer::Right, Answer::None}, "answer");
}
inline ChartKind parse_chart_kind(std::string_view s) {
    return parse_enum(s, std::array{ChartKind::Bar, ChartKind::Pie, ChartKind::Map}, "chart kind");
}

// --- datasets -------------------------------------------------------------------

struct StudyDataset {
    int id = 0;
    std::array<double, 7> values{};  // index-aligned with kVegetables
    std::pair<std::string, std::string> target_pair;

    double value(std::string_view category) const {
        for (std::size_t i = 0; i < kVegetables.size(); ++i)
            if (kVegetables[i] == category) return values[i];
        fail(ErrorCode::UnknownCategory, "no category '" + std::string(category) + "'");
    }

    Dataset as_dataset() const {
        Dataset d;
        for (std::size_t i = 0; i < kVegetables.size(); ++i) d.values[std::string(kVegetables[i])] = values[i];
        return d;
    }

    bool operator==(const StudyDataset&) const = default;
};

/// Ten datasets of seven whole values in [5, 95]; the two targets differ by at
/// least 5. Candidates violating the gap are rejected and redrawn.
inline std::vector<StudyDataset> generate_datasets(std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<StudyDataset> out;
    for (int id = 1; id <= kDatasetCount; ++id) {
        StudyDataset d;
        d.id = id;
        for (;;) {
            for (auto& v : d.values) v = static_cast<double>(kMinValue + rng.below(kMaxValue - kMinValue + 1));
            const auto a = rng.below(7);
            auto b = rng.below(6);
            if (b >= a) ++b;
            if (std::abs(d.values[a] - d.values[b]) >= kMinTargetGap) {
                d.target_pair = {std::string(kVegetables[a]), std::string(kVegetables[b])};
                break;
            }
        }
        out.push_back(d);
    }
    return out;
}

// --- schedule -------------------------------------------------------------------

struct Trial {
    int index = 0;
    Question question = Question::More;
    FillType fill = FillType::Geometric;
    ChartKind chart = ChartKind::Bar;
    int dataset_id = 1;
    std::string left_target;
    std::string right_target;
    std::vector<std::string> category_order;
    bool training = false;

    bool operator==(const Trial&) const = default;
};

inline std::size_t position_of(const std::vector<std::string>& order, std::string_view name) {
    return static_cast<std::size_t>(std::find(order.begin(), order.end(), name) - order.begin());
}

/// Horizontal position of a category's mark centre for `order`: bar slot index
/// or the x of the pie slice's mid-angle direction (12 o'clock, clockwise).
inline double mark_x(ChartKind chart, const std::vector<std::string>& order, const StudyDataset& d,
                     std::string_view name) {
    const std::size_t pos = position_of(order, name);
    if (chart != ChartKind::Pie) return static_cast<double>(pos);
    double total = 0.0, before = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
        total += d.value(order[k]);
        if (k < pos) before += d.value(order[k]);
    }
    return std::sin(deg_to_rad(360.0 * (before + d.value(name) / 2.0) / total));
}

namespace study_detail {

inline std::vector<std::string> shuffled_categories(SplitMix64& rng) {
    std::vector<std::string> order(kVegetables.begin(), kVegetables.end());
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[rng.below(i + 1)]);
    return order;
}

template <typename T>
void shuffle(std::vector<T>& v, SplitMix64& rng) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

/// Minimum horizontal separation of the two pie targets, as a fraction of the radius.
inline constexpr double kPieMinSeparation = 0.05;

/// Category order for one stimulus image. Pie orders are redrawn until the two
/// targets sit at least `kPieMinSeparation` radii apart horizontally; after a
/// bounded number of draws the widest separation is kept.
inline std::vector<std::string> stimulus_order(ChartKind chart, const StudyDataset& d, SplitMix64& rng) {
    if (chart != ChartKind::Pie) return shuffled_categories(rng);
    std::vector<std::string> best;
    double best_gap = -1.0;
    for (int attempt = 0; attempt < 4096; ++attempt) {
        auto order = shuffled_categories(rng);
        const auto& [a, b] = d.target_pair;
        const double gap = std::abs(mark_x(chart, order, d, a) - mark_x(chart, order, d, b));
        if (gap >= kPieMinSeparation) return order;
        if (gap > best_gap) {
            best_gap = gap;
            best = std::move(order);
        }
    }
    return best;
}

/// The target drawn further left answers the left key.
inline void assign_sides(Trial& t, const StudyDataset& d) {
    const auto& [a, b] = d.target_pair;
    const bool a_left = mark_x(t.chart, t.category_order, d, a) < mark_x(t.chart, t.category_order, d, b);
    t.left_target = a_left ? a : b;
    t.right_target = a_left ? b : a;
}

inline std::uint64_t chart_tag(ChartKind chart) { return 0xC0FFEEULL + static_cast<std::uint64_t>(chart); }

} // namespace study_detail

/// 60 trials grouped by question, then by fill; block order, within-block
/// order and per-image category orders are drawn from `seed`.
inline std::vector<Trial> build_trial_schedule(std::uint64_t seed, ChartKind chart,
                                               const std::vector<StudyDataset>& datasets) {
    using namespace study_detail;
    if (chart == ChartKind::Map) fail(ErrorCode::InvalidSpec, "the study uses bar and pie charts only");
    if (datasets.size() != static_cast<std::size_t>(kDatasetCount))
        fail(ErrorCode::InvalidSpec, "schedule needs exactly 10 datasets");
    SplitMix64 rng = SplitMix64(seed).split(chart_tag(chart));

    std::map<std::pair<FillType, int>, std::vector<std::string>> orders;
    for (FillType f : kFillTypes)
        for (const auto& d : datasets) orders[{f, d.id}] = stimulus_order(chart, d, rng);

    std::vector<Question> questions(kQuestions.begin(), kQuestions.end());
    shuffle(questions, rng);
    std::vector<Trial> out;
    for (Question q : questions) {
        std::vector<FillType> fills(kFillTypes.begin(), kFillTypes.end());
        shuffle(fills, rng);
        for (FillType f : fills) {
            std::vector<const StudyDataset*> block;
            for (const auto& d : datasets) block.push_back(&d);
            shuffle(block, rng);
            for (const auto* d : block) {
                Trial t;
                t.index = static_cast<int>(out.size());
                t.question = q;
                t.fill = f;
                t.chart = chart;
                t.dataset_id = d->id;
                t.category_order = orders.at({f, d->id});
                assign_sides(t, *d);
                out.push_back(std::move(t));
            }
        }
    }
    return out;
}

inline std::vector<Trial> build_trial_schedule(std::uint64_t seed, ChartKind chart) {
    return build_trial_schedule(seed, chart, generate_datasets(seed));
}

/// Practice trials drawn with the same rules, flagged `training`.
inline std::vector<Trial> build_training_trials(std::uint64_t seed, ChartKind chart, int count,
                                                std::vector<StudyDataset>* datasets_out = nullptr) {
    using namespace study_detail;
    SplitMix64 rng = SplitMix64(seed).split(chart_tag(chart) ^ 0x7A11ULL);
    const auto datasets = generate_datasets(rng());
    std::vector<Trial> out;
    for (int k = 0; k < count; ++k) {
        const auto& d = datasets[static_cast<std::size_t>(k) % datasets.size()];
        Trial t;
        t.index = k;
        t.question = kQuestions[rng.below(2)];
        t.fill = kFillTypes[rng.below(3)];
        t.chart = chart;
        t.dataset_id = d.id;
        t.category_order = stimulus_order(chart, d, rng);
        assign_sides(t, d);
        t.training = true;
        out.push_back(std::move(t));
    }
    if (datasets_out) *datasets_out = datasets;
    return out;
}

/// The side holding the answer to the trial's question.
inline Answer correct_answer(const Trial& t, const StudyDataset& d) {
    const double l = d.value(t.left_target), r = d.value(t.right_target);
    const bool left_more = l > r;
    return (t.question == Question::More) == left_more ? Answer::Left : Answer::Right;
}

inline Json to_json(const StudyDataset& d) {
    return Json{{"id", d.id},
                {"values", to_json(d.as_dataset())},
                {"targets", Json::array({d.target_pair.first, d.target_pair.second})}};
}

inline Json to_json(const Trial& t) {
    return Json{{"index", t.index},
                {"question", std::string(to_string(t.question))},
                {"fill", std::string(to_string(t.fill))},
                {"chart", std::string(to_string(t.chart))},
                {"dataset_id", t.dataset_id},
                {"left", t.left_target},
                {"right", t.right_target},
                {"category_order", t.category_order},
                {"training", t.training}};
}

// --- stimuli --------------------------------------------------------------------

struct Stimulus {
    std::string file;  // file stem, e.g. "bar-geometric-d03"
    ChartSpec chart;
    Dataset data;
};

struct StimulusManifest {
    std::vector<std::string> trial_files;  // trial index → stem
    std::map<std::string, Stimulus> stimuli;
};

inline std::string stimulus_name(ChartKind chart, FillType fill, int dataset_id) {
    std::string id = std::to_string(dataset_id);
    if (id.size() < 2) id = "0" + id;
    return std::string(to_string(chart)) + "-" + std::string(to_string(fill)) + "-d" + id;
}

/// Chart for one stimulus: the winning design for the fill type (light gray
/// for unicolor) with categories placed in the trial's order.
inline ChartSpec stimulus_chart(const Trial& t, const PresetLibrary& lib) {
    ChartSpec base;
    if (t.fill == FillType::Unicolor) {
        base = lib.winner(t.chart, PresetKind::Geometric).chart;
        base.categories = unicolor_categories(kLightGray);
    } else {
        base = lib.winner(t.chart, t.fill == FillType::Geometric ? PresetKind::Geometric : PresetKind::Iconic).chart;
    }
    ChartSpec out = base;
    out.categories.clear();
    for (const auto& name : t.category_order) {
        const Category* c = base.find(name);
        if (!c) fail(ErrorCode::UnknownCategory, "preset has no category '" + name + "'");
        out.categories.push_back(*c);
    }
    return out;
}

inline StimulusManifest build_stimuli(const std::vector<Trial>& schedule, const std::vector<StudyDataset>& datasets,
                                      const PresetLibrary& lib = PresetLibrary::builtin()) {
    StimulusManifest m;
    for (const auto& t : schedule) {
        const std::string name = stimulus_name(t.chart, t.fill, t.dataset_id);
        m.trial_files.push_back(name);
        if (m.stimuli.contains(name)) continue;
        const auto it = std::find_if(datasets.begin(), datasets.end(), [&](const auto& d) { return d.id == t.dataset_id; });
        if (it == datasets.end()) fail(ErrorCode::MismatchedDataset, "no dataset " + std::to_string(t.dataset_id));
        m.stimuli[name] = {name, stimulus_chart(t, lib), it->as_dataset()};
    }
    return m;
}

inline Json to_json(const StimulusManifest& m, const std::vector<Trial>& schedule) {
    Json trials = Json::array();
    for (std::size_t k = 0; k < schedule.size(); ++k) {
        const auto& t = schedule[k];
        trials.push_back({{"index", t.index},
                          {"file", m.trial_files[k] + ".svg"},
                          {"question", std::string(to_string(t.question))},
                          {"fill", std::string(to_string(t.fill))},
                          {"chart", std::string(to_string(t.chart))},
                          {"dataset_id", t.dataset_id},
                          {"left", t.left_target},
                          {"right", t.right_target},
                          {"category_order", t.category_order}});
    }
    Json images = Json::array();
    for (const auto& [name, _] : m.stimuli) images.push_back(name + ".svg");
    return {{"images", images}, {"trials", trials}};
}

/// Cross-checks a manifest against its schedule. Returns human-readable problems.
inline std::vector<std::string> validate_manifest(const Json& manifest, const std::vector<Trial>& schedule) {
    std::vector<std::string> problems;
    if (!manifest.contains("trials") || !manifest.contains("images")) return {"manifest lacks trials or images"};
    std::set<std::string> images;
    for (const auto& i : manifest["images"]) images.insert(i.get<std::string>());
    if (manifest["trials"].size() != schedule.size()) problems.push_back("trial count differs from schedule");
    std::set<std::string> used;
    for (std::size_t k = 0; k < manifest["trials"].size() && k < schedule.size(); ++k) {
        const auto& e = manifest["trials"][k];
        const auto& t = schedule[k];
        const std::string file = e.value("file", "");
        if (!images.contains(file)) problems.push_back("trial " + std::to_string(k) + " references unknown " + file);
        used.insert(file);
        if (e.value("index", -1) != t.index || e.value("dataset_id", -1) != t.dataset_id ||
            e.value("left", "") != t.left_target || e.value("right", "") != t.right_target)
            problems.push_back("trial " + std::to_string(k) + " disagrees with the schedule");
        if (file != stimulus_name(t.chart, t.fill, t.dataset_id) + ".svg")
            problems.push_back("trial " + std::to_string(k) + " maps to the wrong image");
    }
    if (used != images) problems.push_back("manifest lists images no trial uses");
    return problems;
}

using SceneWriter = std::function<void(const std::filesystem::path&, const Scene&)>;

/// Writes one SVG per stimulus and manifest.json into `dir`. `extra` is called
/// per stimulus with the path stem, e.g. to add a PNG.
inline StimulusManifest export_stimuli(const std::vector<Trial>& schedule, const std::vector<StudyDataset>& datasets,
                                       const std::filesystem::path& dir,
                                       const PresetLibrary& lib = PresetLibrary::builtin(),
                                       const SceneWriter& extra = {}) {
    std::filesystem::create_directories(dir);
    auto m = build_stimuli(schedule, datasets, lib);
    for (const auto& [name, s] : m.stimuli) {
        Scene scene;
        try {
            scene = build_chart_scene(s.chart, s.data, {.glyphs = &lib.glyphs});
        } catch (const Error& e) {
            fail(ErrorCode::RenderFailure, "stimulus " + name + ": " + e.what());
        }
        std::ofstream(dir / (name + ".svg"), std::ios::binary) << to_svg(scene);
        if (extra) extra(dir / name, scene);
    }
    std::ofstream(dir / "manifest.json", std::ios::binary) << to_json(m, schedule).dump(2) << "\n";
    return m;
}

// --- logs -----------------------------------------------------------------------

struct TrialRecord {
    std::string participant_id;
    ChartKind chart = ChartKind::Bar;
    FillType fill = FillType::Geometric;
    Question question = Question::More;
    int dataset_id = 1;
    std::string left;
    std::string right;
    Answer answer = Answer::None;
    bool correct = false;
    double response_ms = 0.0;
    bool timed_out = false;
    bool training = false;

    bool operator==(const TrialRecord&) const = default;
};

struct RatingRecord {
    std::string participant_id;
    std::string design_id;
    std::array<int, 5> beauvis{};
    int vibratory = 4;
    bool rank_first = false;

    bool operator==(const RatingRecord&) const = default;
};

inline const csv::Row kTrialHeader{"participant_id", "chart",   "fill",        "question",  "dataset_id", "left",
                                   "right",          "answer",  "correct",     "response_ms", "timed_out", "training"};
inline const csv::Row kRatingHeader{"participant_id", "design_id", "b1",       "b2",        "b3",
                                    "b4",             "b5",        "vibratory", "rank_first"};

namespace study_detail {

inline std::string bool_text(bool b) { return b ? "true" : "false"; }

inline bool parse_bool(std::string_view s, std::size_t line) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": expected true|false, got '" + std::string(s) + "'");
}

template <typename T>
T parse_number(std::string_view s, std::size_t line) {
    T v{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
    return v;
}

inline std::vector<csv::Row> body(std::string_view text, const csv::Row& header) {
    auto rows = csv::parse(text);
    if (rows.empty() || rows.front() != header) fail(ErrorCode::ParseError, "missing or unexpected header row");
    rows.erase(rows.begin());
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (rows[i].size() != header.size())
            fail(ErrorCode::ParseError, "line " + std::to_string(i + 2) + ": expected " + std::to_string(header.size()) +
                                            " fields, got " + std::to_string(rows[i].size()));
    return rows;
}

} // namespace study_detail

inline std::string trials_to_csv(const std::vector<TrialRecord>& rows) {
    using study_detail::bool_text;
    std::vector<csv::Row> out{kTrialHeader};
    for (const auto& r : rows)
        out.push_back({r.participant_id, std::string(to_string(r.chart)), std::string(to_string(r.fill)),
                       std::string(to_string(r.question)), std::to_string(r.dataset_id), r.left, r.right,
                       std::string(to_string(r.answer)), bool_text(r.correct), svg::num(r.response_ms),
                       bool_text(r.timed_out), bool_text(r.training)});
    return csv::write(out);
}

inline std::vector<TrialRecord> trials_from_csv(std::string_view text) {
    using namespace study_detail;
    std::vector<TrialRecord> out;
    std::size_t line = 1;
    for (const auto& f : body(text, kTrialHeader)) {
        ++line;
        TrialRecord r;
        r.participant_id = f[0];
        r.chart = parse_chart_kind(f[1]);
        r.fill = parse_fill(f[2]);
        r.question = parse_question(f[3]);
        r.dataset_id = parse_number<int>(f[4], line);
        r.left = f[5];
        r.right = f[6];
        r.answer = parse_answer(f[7]);
        r.correct = parse_bool(f[8], line);
        r.response_ms = parse_number<double>(f[9], line);
        r.timed_out = parse_bool(f[10], line);
        r.training = parse_bool(f[11], line);
        out.push_back(std::move(r));
    }
    return out;
}

inline std::string ratings_to_csv(const std::vector<RatingRecord>& rows) {
    std::vector<csv::Row> out{kRatingHeader};
    for (const auto& r : rows) {
        csv::Row row{r.participant_id, r.design_id};
        for (int v : r.beauvis) row.push_back(std::to_string(v));
        row.push_back(std::to_string(r.vibratory));
        row.push_back(study_detail::bool_text(r.rank_first));
        out.push_back(std::move(row));
    }
    return csv::write(out);
}

inline std::vector<RatingRecord> ratings_from_csv(std::string_view text) {
    using namespace study_detail;
    std::vector<RatingRecord> out;
    std::size_t line = 1;
    for (const auto& f : body(text, kRatingHeader)) {
        ++line;
        RatingRecord r;
        r.participant_id = f[0];
        r.design_id = f[1];
        for (std::size_t k = 0; k < 5; ++k) r.beauvis[k] = parse_number<int>(f[2 + k], line);
        r.vibratory = parse_number<int>(f[7], line);
        r.rank_first = parse_bool(f[8], line);
        out.push_back(std::move(r));
    }
    return out;
}

// --- timing & validation --------------------------------------------------------

struct TimingPolicy {
    double limit_ms = 5000.0;
    double grace_ms = 50.0;
};

inline bool is_overrun(const TrialRecord& r, const TimingPolicy& p = {}) {
    return !r.timed_out && r.response_ms > p.limit_ms;
}

struct Violation {
    std::optional<std::size_t> row;  // 0-based data row; empty for cross-row findings
    std::string participant_id;
    std::string code;
    std::string message;
    bool warning = false;
};

inline Json to_json(const Violation& v) {
    Json j{{"participant_id", v.participant_id}, {"code", v.code}, {"message", v.message},
           {"severity", v.warning ? "warning" : "error"}};
    j["row"] = v.row ? Json(*v.row) : Json(nullptr);
    return j;
}

/// Row-wise and per-participant checks of a trial log. Violations are data;
/// incomplete participants are reported as warnings and retained.
inline std::vector<Violation> validate_log(const std::vector<TrialRecord>& rows, const TimingPolicy& timing = {}) {
    std::vector<Violation> out;
    std::map<std::string, std::vector<std::size_t>> by_participant;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        auto add = [&](std::string code, std::string msg) { out.push_back({i, r.participant_id, std::move(code), std::move(msg)}); };
        if (r.participant_id.empty()) add("EMPTY_PARTICIPANT", "participant_id is empty");
        if (r.timed_out && r.answer != Answer::None) add("TIMEOUT_WITH_ANSWER", "timed-out trial carries an answer");
        if (!r.timed_out && r.answer == Answer::None) add("MISSING_ANSWER", "answer is none but the trial did not time out");
        if (r.timed_out && r.correct) add("TIMEOUT_CORRECT", "timed-out trial is marked correct");
        if (r.response_ms < 0) add("NEGATIVE_RT", "response_ms is negative");
        if (!r.timed_out && r.response_ms > timing.limit_ms &&
            !(r.correct && r.response_ms <= timing.limit_ms + timing.grace_ms))
            add("LATE_ANSWER", "answer at " + svg::num(r.response_ms) + " ms is beyond the time limit");
        if (r.dataset_id < 1 || r.dataset_id > kDatasetCount) add("BAD_DATASET", "dataset_id outside 1..10");
        if (r.left == r.right) add("SAME_TARGETS", "left and right targets are identical");
        if (r.chart == ChartKind::Map) add("BAD_CHART", "the study uses bar and pie charts only");
        if (!r.training) by_participant[r.participant_id].push_back(i);
    }
    for (const auto& [pid, idx] : by_participant) {
        std::map<std::pair<Question, FillType>, int> cells;
        for (auto i : idx) ++cells[{rows[i].question, rows[i].fill}];
        if (idx.size() != static_cast<std::size_t>(kTrialCount)) {
            out.push_back({std::nullopt, pid, "INCOMPLETE",
                           "participant has " + std::to_string(idx.size()) + " of 60 trials; retained", true});
            continue;
        }
        for (Question q : kQuestions)
            for (FillType f : kFillTypes)
                if (cells[{q, f}] != 10)
                    out.push_back({std::nullopt, pid, "BLOCK_STRUCTURE",
                                   std::string(to_string(q)) + "/" + std::string(to_string(f)) + " has " +
                                       std::to_string(cells[{q, f}]) + " trials, expected 10"});
    }
    return out;
}

/// Block key of a design id: the id without its trailing digits ("BG2" → "BG").
inline std::string design_block(std::string_view design_id) {
    std::size_t end = design_id.size();
    while (end > 0 && std::isdigit(static_cast<unsigned char>(design_id[end - 1]))) --end;
    return std::string(design_id.substr(0, end));
}

inline std::vector<Violation> validate_log(const std::vector<RatingRecord>& rows) {
    std::vector<Violation> out;
    std::map<std::string, std::map<std::string, std::vector<std::size_t>>> blocks;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        auto add = [&](std::string code, std::string msg) { out.push_back({i, r.participant_id, std::move(code), std::move(msg)}); };
        for (int v : r.beauvis)
            if (v < 1 || v > 7) add("ITEM_RANGE", "BeauVis item " + std::to_string(v) + " outside 1..7");
        if (r.vibratory < 1 || r.vibratory > 7) add("ITEM_RANGE", "vibratory rating outside 1..7");
        if (r.design_id.empty()) add("EMPTY_DESIGN", "design_id is empty");
        blocks[r.participant_id][design_block(r.design_id)].push_back(i);
    }
    for (const auto& [pid, per_block] : blocks) {
        std::size_t designs = 0;
        for (const auto& [block, idx] : per_block) {
            designs += idx.size();
            std::set<std::string> ids;
            int firsts = 0;
            for (auto i : idx) {
                ids.insert(rows[i].design_id);
                firsts += rows[i].rank_first;
            }
            if (idx.size() != 4 || ids.size() != 4)
                out.push_back({std::nullopt, pid, "BLOCK_SIZE", "block " + block + " rates " + std::to_string(ids.size()) +
                                                                    " distinct designs, expected 4"});
            if (firsts != 1)
                out.push_back({std::nullopt, pid, "RANK_FIRST",
                               "block " + block + " has " + std::to_string(firsts) + " first-ranked designs, expected 1"});
        }
        if (per_block.size() != 2 || designs != 8)
            out.push_back({std::nullopt, pid, "RATING_COMPLETENESS",
                           "participant rated " + std::to_string(designs) + " designs in " +
                               std::to_string(per_block.size()) + " blocks, expected 8 in 2"});
    }
    return out;
}

// --- reference trial runner -----------------------------------------------------

struct Response {
    Answer answer = Answer::Left;
    double elapsed_ms = 0.0;  // since chart reveal
};

/// Outcome of one trial. No answer within the limit is a timeout, except that a
/// correct answer inside the grace window is kept (an overrun).
inline TrialRecord run_trial(std::string participant_id, const Trial& t, const StudyDataset& d,
                             const std::optional<Response>& response, const TimingPolicy& timing = {}) {
    TrialRecord r;
    r.participant_id = std::move(participant_id);
    r.chart = t.chart;
    r.fill = t.fill;
    r.question = t.question;
    r.dataset_id = t.dataset_id;
    r.left = t.left_target;
    r.right = t.right_target;
    r.training = t.training;
    const Answer expected = correct_answer(t, d);
    const bool in_time = response && response->answer != Answer::None && response->elapsed_ms <= timing.limit_ms;
    const bool in_grace = response && response->answer == expected && response->elapsed_ms > timing.limit_ms &&
                          response->elapsed_ms <= timing.limit_ms + timing.grace_ms;
    if (in_time || in_grace) {
        r.answer = response->answer;
        r.correct = response->answer == expected;
        r.response_ms = response->elapsed_ms;
    } else {
        r.answer = Answer::None;
        r.timed_out = true;
        r.response_ms = timing.limit_ms;
    }
    return r;
}

/// Practice gate: opens after three consecutive correct training trials.
class TrainingGate {
public:
    explicit TrainingGate(int required = 3) : required_(required) {}

    bool record(bool correct) {
        streak_ = correct ? streak_ + 1 : 0;
        return passed();
    }
    bool passed() const { return streak_ >= required_; }

private:
    int required_;
    int streak_ = 0;
};

} // namespace bwtex
