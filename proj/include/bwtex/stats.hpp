#pragma once

// Analysis of study logs: BeauVis scores, percentile bootstrap intervals,
// Bonferroni-adjusted paired comparisons, trial summaries and preference tallies.

#include "bwtex/csv.hpp"
#include "bwtex/error.hpp"
#include "bwtex/json.hpp"
#include "bwtex/rng.hpp"
#include "bwtex/study.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace bwtex {

inline constexpr int kBeauvisItems = 5;
inline constexpr int kLikertMin = 1;
inline constexpr int kLikertMax = 7;
inline constexpr int kDefaultIterations = 10000;

/// Mean of the five 7-point BeauVis items.
inline double beauvis_score(std::span<const int> items) {
    if (items.size() != static_cast<std::size_t>(kBeauvisItems))
        fail(ErrorCode::BadItemCount, "expected 5 items, got " + std::to_string(items.size()));
    for (int v : items)
        if (v < kLikertMin || v > kLikertMax) fail(ErrorCode::OutOfRange, "item " + std::to_string(v) + " outside 1..7");
    return std::accumulate(items.begin(), items.end(), 0.0) / kBeauvisItems;
}

struct CIResult {
    double mean = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double confidence = 0.95;
    int iterations = 0;

    bool contains(double x) const { return lower <= x && x <= upper; }
    double width() const { return upper - lower; }
    bool operator==(const CIResult&) const = default;
};

/// Arithmetic mean; a constant sample returns its value exactly.
inline double sample_mean(std::span<const double> xs) {
    if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); })) return xs.front();
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

/// Linear-interpolated quantile of sorted data (Hyndman-Fan type 7).
inline double quantile_sorted(std::span<const double> sorted, double p) {
    const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Resampled means; iteration b draws from its own substream of `seed`, so the
/// result does not depend on evaluation order.
inline std::vector<double> bootstrap_means(std::span<const double> samples, int iterations, std::uint64_t seed) {
    const std::size_t n = samples.size();
    const SplitMix64 root(seed);
    std::vector<double> means(static_cast<std::size_t>(iterations));
    for (int b = 0; b < iterations; ++b) {
        SplitMix64 rng = root.split(static_cast<std::uint64_t>(b));
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) sum += samples[rng.below(n)];
        means[static_cast<std::size_t>(b)] = sum / static_cast<double>(n);
    }
    return means;
}

/// Percentile bootstrap interval of the mean. The bounds are widened to the
/// sample mean when sampling noise puts it outside.
inline CIResult bootstrap_ci(std::span<const double> samples, int iterations = kDefaultIterations,
                             double confidence = 0.95, std::uint64_t seed = 0) {
    if (samples.size() < 2) fail(ErrorCode::TooFewSamples, "bootstrap needs at least 2 samples");
    if (!(confidence > 0.0 && confidence < 1.0)) fail(ErrorCode::OutOfRange, "confidence must lie in (0, 1)");
    if (iterations < 1) fail(ErrorCode::OutOfRange, "iterations must be positive");
    for (double x : samples)
        if (!std::isfinite(x)) fail(ErrorCode::OutOfRange, "samples must be finite");
    CIResult r;
    r.mean = sample_mean(samples);
    r.confidence = confidence;
    r.iterations = iterations;
    if (std::all_of(samples.begin(), samples.end(), [&](double x) { return x == samples.front(); })) {
        r.lower = r.upper = r.mean;
        return r;
    }
    auto means = bootstrap_means(samples, iterations, seed);
    std::sort(means.begin(), means.end());
    const double alpha = 1.0 - confidence;
    r.lower = std::min(quantile_sorted(means, alpha / 2.0), r.mean);
    r.upper = std::max(quantile_sorted(means, 1.0 - alpha / 2.0), r.mean);
    return r;
}

inline CIResult bootstrap_ci(const std::vector<double>& samples, int iterations = kDefaultIterations,
                             double confidence = 0.95, std::uint64_t seed = 0) {
    return bootstrap_ci(std::span<const double>(samples), iterations, confidence, seed);
}

// --- paired comparisons ---------------------------------------------------------

/// condition -> participant -> that participant's mean under the condition.
using GroupMeans = std::map<std::string, std::map<std::string, double>>;

struct ComparisonResult {
    std::pair<std::string, std::string> pair;
    double diff_mean = 0.0;
    CIResult ci;
    int family_size = 1;
    bool excludes_zero = false;
};

/// Paired differences for every condition pair at a fixed per-comparison
/// confidence. Pair k resamples with substream k of `seed`.
inline std::vector<ComparisonResult> pairwise_diffs(const GroupMeans& groups, double confidence, std::uint64_t seed,
                                                    int iterations = kDefaultIterations) {
    if (groups.size() < 2) fail(ErrorCode::InvalidSpec, "comparisons need at least 2 conditions");
    const auto& first = groups.begin()->second;
    for (const auto& [cond, scores] : groups) {
        for (const auto& [pid, v] : scores)
            if (!first.contains(pid))
                fail(ErrorCode::UnpairedParticipant, "participant " + pid + " missing outside condition " + cond);
        for (const auto& [pid, v] : first)
            if (!scores.contains(pid))
                fail(ErrorCode::UnpairedParticipant, "participant " + pid + " missing from condition " + cond);
    }
    const int family = static_cast<int>(groups.size() * (groups.size() - 1) / 2);
    std::vector<ComparisonResult> out;
    std::uint64_t k = 0;
    for (auto a = groups.begin(); a != groups.end(); ++a) {
        for (auto b = std::next(a); b != groups.end(); ++b, ++k) {
            std::vector<double> diffs;
            for (const auto& [pid, v] : a->second) diffs.push_back(v - b->second.at(pid));
            ComparisonResult c;
            c.pair = {a->first, b->first};
            c.ci = bootstrap_ci(diffs, iterations, confidence, SplitMix64(seed).split(k)());
            c.diff_mean = c.ci.mean;
            c.family_size = family;
            c.excludes_zero = !c.ci.contains(0.0);
            out.push_back(std::move(c));
        }
    }
    return out;
}

inline double bonferroni_confidence(double family_alpha, int comparisons) {
    return 1.0 - family_alpha / static_cast<double>(comparisons);
}

/// All k(k-1)/2 paired comparisons, each at confidence 1 - alpha / k(k-1)/2.
inline std::vector<ComparisonResult> pairwise_diffs_bonferroni(const GroupMeans& groups, double family_alpha = 0.05,
                                                               std::uint64_t seed = 0,
                                                               int iterations = kDefaultIterations) {
    if (!(family_alpha > 0.0 && family_alpha < 1.0)) fail(ErrorCode::OutOfRange, "alpha must lie in (0, 1)");
    if (groups.size() < 2) fail(ErrorCode::InvalidSpec, "comparisons need at least 2 conditions");
    const int family = static_cast<int>(groups.size() * (groups.size() - 1) / 2);
    return pairwise_diffs(groups, bonferroni_confidence(family_alpha, family), seed, iterations);
}

// --- trial summaries --------------------------------------------------------------

struct ExclusionPolicy {
    double min_accuracy = 0.90;
    bool correct_only_rt = true;
    bool drop_timeouts = true;
    double overrun_grace_ms = 50.0;
    double limit_ms = 5000.0;
    bool include_overrun_in_rt = false;

    void validate() const {
        if (!(min_accuracy >= 0.0 && min_accuracy <= 1.0)) fail(ErrorCode::OutOfRange, "min_accuracy outside [0, 1]");
        if (!(overrun_grace_ms >= 0.0)) fail(ErrorCode::OutOfRange, "overrun grace must be non-negative");
        if (!(limit_ms > 0.0)) fail(ErrorCode::OutOfRange, "time limit must be positive");
    }
};

/// `Original` keeps every participant; `Refined` drops those under the accuracy threshold.
enum class PolicyVariant { Original, Refined };

inline std::string_view to_string(PolicyVariant v) { return v == PolicyVariant::Original ? "original" : "refined"; }

inline PolicyVariant parse_policy_variant(std::string_view s) {
    if (s == "original") return PolicyVariant::Original;
    if (s == "refined") return PolicyVariant::Refined;
    fail(ErrorCode::ParseError, "policy must be original or refined, got '" + std::string(s) + "'");
}

struct Condition {
    ChartKind chart = ChartKind::Bar;
    FillType fill = FillType::Geometric;

    auto operator<=>(const Condition&) const = default;
};

inline std::string to_string(const Condition& c) {
    return std::string(to_string(c.chart)) + "/" + std::string(to_string(c.fill));
}

struct ConditionSummary {
    Condition condition;
    std::size_t trials = 0;
    std::size_t timeouts = 0;
    std::size_t overruns = 0;
    std::size_t rt_trials = 0;
    double accuracy = 0.0;                    // mean of participant accuracies
    std::optional<double> mean_rt_ms;         // mean of participant RT means
    std::map<std::string, double> participant_accuracy;
    std::map<std::string, double> participant_rt_ms;
};

struct TrialSummary {
    PolicyVariant variant = PolicyVariant::Refined;
    ExclusionPolicy policy;
    std::map<std::string, double> overall_accuracy;  // every participant, before exclusion
    std::vector<std::string> included;
    std::vector<std::string> excluded;
    std::vector<ConditionSummary> conditions;

    const ConditionSummary* find(Condition c) const {
        for (const auto& s : conditions)
            if (s.condition == c) return &s;
        return nullptr;
    }
};

/// Correct and answered within limit + grace.
inline bool counts_correct(const TrialRecord& r, const ExclusionPolicy& p) {
    return r.correct && !r.timed_out && r.response_ms <= p.limit_ms + p.overrun_grace_ms;
}

inline bool enters_rt(const TrialRecord& r, const ExclusionPolicy& p) {
    if (p.drop_timeouts && r.timed_out) return false;
    if (p.correct_only_rt && !counts_correct(r, p)) return false;
    if (!p.include_overrun_in_rt && r.response_ms > p.limit_ms) return false;
    return true;
}

inline TrialSummary summarize_trials(const std::vector<TrialRecord>& records, const ExclusionPolicy& policy = {},
                                     PolicyVariant variant = PolicyVariant::Refined) {
    policy.validate();
    std::map<std::string, std::pair<std::size_t, std::size_t>> tally;  // correct, total
    for (const auto& r : records) {
        if (r.training) continue;
        auto& [ok, n] = tally[r.participant_id];
        ok += counts_correct(r, policy) ? 1 : 0;
        ++n;
    }
    TrialSummary out;
    out.variant = variant;
    out.policy = policy;
    std::set<std::string> keep;
    for (const auto& [pid, t] : tally) {
        const double acc = static_cast<double>(t.first) / static_cast<double>(t.second);
        out.overall_accuracy[pid] = acc;
        if (variant == PolicyVariant::Original || acc >= policy.min_accuracy) {
            keep.insert(pid);
            out.included.push_back(pid);
        } else {
            out.excluded.push_back(pid);
        }
    }
    if (keep.empty()) fail(ErrorCode::EmptyAfterExclusion, "no participants left to summarize");

    struct Acc {
        std::size_t correct = 0, total = 0, rt_n = 0;
        double rt_sum = 0.0;
    };
    std::map<Condition, ConditionSummary> by_cond;
    std::map<Condition, std::map<std::string, Acc>> per;
    for (const auto& r : records) {
        if (r.training || !keep.contains(r.participant_id)) continue;
        const Condition c{r.chart, r.fill};
        auto& s = by_cond[c];
        s.condition = c;
        ++s.trials;
        s.timeouts += r.timed_out ? 1 : 0;
        s.overruns += is_overrun(r, {policy.limit_ms, policy.overrun_grace_ms}) ? 1 : 0;
        auto& a = per[c][r.participant_id];
        ++a.total;
        a.correct += counts_correct(r, policy) ? 1 : 0;
        if (enters_rt(r, policy)) {
            ++a.rt_n;
            a.rt_sum += r.response_ms;
            ++s.rt_trials;
        }
    }
    for (auto& [c, s] : by_cond) {
        double acc_sum = 0.0, rt_sum = 0.0;
        for (const auto& [pid, a] : per[c]) {
            const double acc = static_cast<double>(a.correct) / static_cast<double>(a.total);
            s.participant_accuracy[pid] = acc;
            acc_sum += acc;
            if (a.rt_n > 0) {
                const double rt = a.rt_sum / static_cast<double>(a.rt_n);
                s.participant_rt_ms[pid] = rt;
                rt_sum += rt;
            }
        }
        s.accuracy = acc_sum / static_cast<double>(s.participant_accuracy.size());
        if (!s.participant_rt_ms.empty()) s.mean_rt_ms = rt_sum / static_cast<double>(s.participant_rt_ms.size());
        out.conditions.push_back(std::move(s));
    }
    return out;
}

// --- ratings ---------------------------------------------------------------------

/// How often each design was ranked first; designs never ranked first map to 0.
inline std::map<std::string, int> rank_first_counts(const std::vector<RatingRecord>& ratings) {
    std::map<std::string, int> counts;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& r : ratings) {
        counts.try_emplace(r.design_id, 0);
        if (!r.rank_first) continue;
        if (!seen.emplace(r.participant_id, design_block(r.design_id)).second)
            fail(ErrorCode::DuplicateRankFirst,
                 r.participant_id + " ranked two " + design_block(r.design_id) + " designs first");
        ++counts[r.design_id];
    }
    return counts;
}

// --- reports ---------------------------------------------------------------------

struct ReportOptions {
    int iterations = kDefaultIterations;
    double family_alpha = 0.05;
    std::uint64_t seed = 0;
};

inline Json to_json(const CIResult& ci) {
    return Json{{"mean", ci.mean},
                {"lower", ci.lower},
                {"upper", ci.upper},
                {"confidence", ci.confidence},
                {"iterations", ci.iterations}};
}

inline Json to_json(const ComparisonResult& c) {
    return Json{{"a", c.pair.first},         {"b", c.pair.second},       {"diff_mean", c.diff_mean},
                {"ci", to_json(c.ci)},       {"family_size", c.family_size},
                {"excludes_zero", c.excludes_zero}};
}

namespace stats_detail {

inline Json interval_or_null(const std::map<std::string, double>& by_participant, const ReportOptions& o,
                             std::uint64_t stream) {
    if (by_participant.size() < 2) return nullptr;
    std::vector<double> xs;
    for (const auto& [pid, v] : by_participant) xs.push_back(v);
    return to_json(bootstrap_ci(xs, o.iterations, 0.95, SplitMix64(o.seed).split(stream)()));
}

/// Comparisons restricted to participants present in every condition.
inline Json comparisons_or_empty(GroupMeans groups, const ReportOptions& o, std::uint64_t stream) {
    if (groups.size() < 2) return Json::array();
    std::set<std::string> common;
    for (const auto& [pid, v] : groups.begin()->second) common.insert(pid);
    for (const auto& [c, m] : groups)
        std::erase_if(common, [&](const std::string& pid) { return !m.contains(pid); });
    if (common.size() < 2) return Json::array();
    for (auto& [c, m] : groups) std::erase_if(m, [&](const auto& kv) { return !common.contains(kv.first); });
    Json arr = Json::array();
    for (const auto& c : pairwise_diffs_bonferroni(groups, o.family_alpha, SplitMix64(o.seed).split(stream)(),
                                                   o.iterations))
        arr.push_back(to_json(c));
    return arr;
}

} // namespace stats_detail

inline Json trials_report(const TrialSummary& s, const ReportOptions& o = {}) {
    Json conds = Json::array();
    std::uint64_t stream = 0;
    std::map<ChartKind, GroupMeans> acc_groups, rt_groups;
    for (const auto& c : s.conditions) {
        Json j{{"condition", to_string(c.condition)},
               {"chart", std::string(to_string(c.condition.chart))},
               {"fill", std::string(to_string(c.condition.fill))},
               {"participants", c.participant_accuracy.size()},
               {"trials", c.trials},
               {"timeouts", c.timeouts},
               {"overruns", c.overruns},
               {"rt_trials", c.rt_trials},
               {"accuracy", c.accuracy},
               {"accuracy_ci", stats_detail::interval_or_null(c.participant_accuracy, o, stream++)},
               {"mean_rt_ms", c.mean_rt_ms ? Json(*c.mean_rt_ms) : Json(nullptr)},
               {"rt_ci", stats_detail::interval_or_null(c.participant_rt_ms, o, stream++)}};
        conds.push_back(std::move(j));
        acc_groups[c.condition.chart][std::string(to_string(c.condition.fill))] = c.participant_accuracy;
        rt_groups[c.condition.chart][std::string(to_string(c.condition.fill))] = c.participant_rt_ms;
    }
    Json comps = Json::array();
    for (const auto& [chart, groups] : acc_groups) {
        comps.push_back({{"chart", std::string(to_string(chart))},
                         {"measure", "accuracy"},
                         {"comparisons", stats_detail::comparisons_or_empty(groups, o, 1000 + stream++)}});
        comps.push_back({{"chart", std::string(to_string(chart))},
                         {"measure", "response_ms"},
                         {"comparisons", stats_detail::comparisons_or_empty(rt_groups[chart], o, 1000 + stream++)}});
    }
    const auto& p = s.policy;
    return Json{{"kind", "trials"},
                {"variant", std::string(to_string(s.variant))},
                {"policy",
                 {{"min_accuracy", p.min_accuracy},
                  {"correct_only_rt", p.correct_only_rt},
                  {"drop_timeouts", p.drop_timeouts},
                  {"overrun_grace_ms", p.overrun_grace_ms},
                  {"limit_ms", p.limit_ms},
                  {"include_overrun_in_rt", p.include_overrun_in_rt}}},
                {"participants", s.overall_accuracy.size()},
                {"included", s.included},
                {"excluded", s.excluded},
                {"overall_accuracy", s.overall_accuracy},
                {"conditions", std::move(conds)},
                {"comparisons", std::move(comps)},
                {"seed", o.seed},
                {"iterations", o.iterations}};
}

inline Json ratings_report(const std::vector<RatingRecord>& ratings, const ReportOptions& o = {}) {
    std::map<std::string, std::map<std::string, double>> beauvis, vibratory;
    for (const auto& r : ratings) {
        beauvis[r.design_id][r.participant_id] = beauvis_score(r.beauvis);
        if (r.vibratory < kLikertMin || r.vibratory > kLikertMax)
            fail(ErrorCode::OutOfRange, "vibratory rating outside 1..7");
        vibratory[r.design_id][r.participant_id] = r.vibratory;
    }
    const auto counts = rank_first_counts(ratings);
    Json designs = Json::array();
    std::map<std::string, GroupMeans> blocks;
    std::uint64_t stream = 0;
    for (const auto& [id, scores] : beauvis) {
        double sum = 0.0, vsum = 0.0;
        for (const auto& [pid, v] : scores) sum += v;
        for (const auto& [pid, v] : vibratory[id]) vsum += v;
        designs.push_back({{"design_id", id},
                           {"block", design_block(id)},
                           {"participants", scores.size()},
                           {"beauvis_mean", sum / static_cast<double>(scores.size())},
                           {"beauvis_ci", stats_detail::interval_or_null(scores, o, stream++)},
                           {"vibratory_mean", vsum / static_cast<double>(vibratory[id].size())},
                           {"vibratory_ci", stats_detail::interval_or_null(vibratory[id], o, stream++)},
                           {"rank_first", counts.at(id)}});
        blocks[design_block(id)][id] = scores;
    }
    Json comps = Json::array();
    for (const auto& [block, groups] : blocks)
        comps.push_back({{"block", block},
                         {"measure", "beauvis"},
                         {"comparisons", stats_detail::comparisons_or_empty(groups, o, 1000 + stream++)}});
    return Json{{"kind", "ratings"},         {"designs", std::move(designs)}, {"comparisons", std::move(comps)},
                {"rank_first", counts},      {"seed", o.seed},                 {"iterations", o.iterations}};
}

/// Plot-ready interval endpoints from a trials or ratings report.
inline std::string intervals_csv(const Json& report) {
    std::vector<csv::Row> rows{{"measure", "condition", "mean", "lower", "upper"}};
    const auto add = [&](const std::string& measure, const std::string& cond, const Json& ci) {
        if (ci.is_null()) return;
        rows.push_back({measure, cond, svg::num(ci.at("mean").get<double>()), svg::num(ci.at("lower").get<double>()),
                        svg::num(ci.at("upper").get<double>())});
    };
    if (report.at("kind") == "trials") {
        for (const auto& c : report.at("conditions")) {
            add("accuracy", c.at("condition").get<std::string>(), c.at("accuracy_ci"));
            add("response_ms", c.at("condition").get<std::string>(), c.at("rt_ci"));
        }
    } else {
        for (const auto& d : report.at("designs")) {
            add("beauvis", d.at("design_id").get<std::string>(), d.at("beauvis_ci"));
            add("vibratory", d.at("design_id").get<std::string>(), d.at("vibratory_ci"));
        }
    }
    return csv::write(rows);
}

} // namespace bwtex
