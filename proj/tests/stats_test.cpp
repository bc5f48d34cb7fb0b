#include "bwtex/stats.hpp"

#include "support/naive_bootstrap.hpp"
#include "support/synthetic_log.hpp"

#include <gtest/gtest.h>

#include <array>
#include <random>

using namespace bwtex;

namespace {

std::vector<double> uniform_samples(std::size_t n, unsigned seed) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> xs(n);
    for (auto& x : xs) x = u(gen);
    return xs;
}

GroupMeans three_conditions(unsigned seed, int participants = 20) {
    std::mt19937 gen(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    GroupMeans g;
    for (int p = 0; p < participants; ++p) {
        const std::string pid = "p" + std::to_string(p);
        const double base = noise(gen);
        g["geometric"][pid] = base + 0.5 + noise(gen) * 0.3;
        g["iconic"][pid] = base + 0.2 + noise(gen) * 0.3;
        g["unicolor"][pid] = base + noise(gen) * 0.3;
    }
    return g;
}

} // namespace

TEST(Beauvis, MeanOfFiveItems) {
    EXPECT_DOUBLE_EQ(beauvis_score(std::array{5, 5, 5, 5, 5}), 5.0);
    EXPECT_DOUBLE_EQ(beauvis_score(std::array{4, 5, 6, 3, 7}), 5.0);
    EXPECT_DOUBLE_EQ(beauvis_score(std::array{1, 1, 1, 1, 2}), 1.2);
}

TEST(Beauvis, ItemCountAndRangeErrors) {
    try {
        beauvis_score(std::array{4, 4, 4, 4});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BadItemCount);
    }
    try {
        beauvis_score(std::array{4, 4, 8, 4, 4});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
    }
    EXPECT_THROW(beauvis_score(std::array{0, 4, 4, 4, 4}), Error);
}

TEST(Beauvis, BoundedAndPermutationInvariant) {
    std::mt19937 gen(3);
    std::uniform_int_distribution<int> item(1, 7);
    for (int k = 0; k < 200; ++k) {
        std::array<int, 5> a{};
        for (auto& v : a) v = item(gen);
        const double s = beauvis_score(a);
        EXPECT_GE(s, 1.0);
        EXPECT_LE(s, 7.0);
        std::shuffle(a.begin(), a.end(), gen);
        EXPECT_DOUBLE_EQ(beauvis_score(a), s);
    }
}

TEST(Bootstrap, EqualSamplesGiveZeroWidth) {
    for (double v : {0.1, 3.0, -2.75}) {
        const auto ci = bootstrap_ci(std::vector<double>(17, v), 2000, 0.95, 9);
        EXPECT_EQ(ci.lower, v);
        EXPECT_EQ(ci.upper, v);
        EXPECT_EQ(ci.mean, v);
    }
}

TEST(Bootstrap, BinarySamplesMatchNaiveOracle) {
    std::vector<double> xs(1000);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = static_cast<double>(i % 2);
    const auto ci = bootstrap_ci(xs, 10000, 0.95, 42);
    const auto [lo, hi] = oracle::naive_bootstrap(xs, 10000, 0.95, 42);
    EXPECT_NEAR(ci.lower, lo, 0.02);
    EXPECT_NEAR(ci.upper, hi, 0.02);
    EXPECT_DOUBLE_EQ(ci.mean, 0.5);
}

TEST(Bootstrap, HalfWidthShrinksWithSquareRootOfN) {
    const auto w100 = bootstrap_ci(uniform_samples(100, 1), 10000, 0.95, 5).width();
    const auto w400 = bootstrap_ci(uniform_samples(400, 2), 10000, 0.95, 5).width();
    EXPECT_NEAR(w400, w100 / 2.0, 0.2 * w100 / 2.0);
}

TEST(Bootstrap, DeterministicPerSeedAndContainsMean) {
    const auto xs = uniform_samples(30, 7);
    const auto a = bootstrap_ci(xs, 3000, 0.9, 11);
    EXPECT_EQ(a, bootstrap_ci(xs, 3000, 0.9, 11));
    EXPECT_NE(a, bootstrap_ci(xs, 3000, 0.9, 12));
    EXPECT_TRUE(a.contains(a.mean));
    EXPECT_EQ(a.iterations, 3000);
    EXPECT_DOUBLE_EQ(a.confidence, 0.9);
}

TEST(Bootstrap, TooFewSamples) {
    try {
        bootstrap_ci(std::vector<double>{1.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::TooFewSamples);
    }
    EXPECT_THROW(bootstrap_ci(std::vector<double>{1.0, 2.0}, 100, 1.0), Error);
}

TEST(Bonferroni, ThreeConditionsThreeComparisons) {
    const auto res = pairwise_diffs_bonferroni(three_conditions(1), 0.05, 3, 2000);
    ASSERT_EQ(res.size(), 3u);
    for (const auto& c : res) {
        EXPECT_EQ(c.ci.confidence, 1.0 - 0.05 / 3.0);
        EXPECT_EQ(c.family_size, 3);
    }
    EXPECT_EQ(res[0].pair, (std::pair<std::string, std::string>{"geometric", "iconic"}));
    EXPECT_EQ(res[2].pair, (std::pair<std::string, std::string>{"iconic", "unicolor"}));
}

TEST(Bonferroni, IdenticalGroupsHaveZeroDiffs) {
    auto g = three_conditions(2);
    g["iconic"] = g["geometric"];
    g["unicolor"] = g["geometric"];
    for (const auto& c : pairwise_diffs_bonferroni(g, 0.05, 1, 1000)) {
        EXPECT_EQ(c.diff_mean, 0.0);
        EXPECT_TRUE(c.ci.contains(0.0));
        EXPECT_FALSE(c.excludes_zero);
    }
}

TEST(Bonferroni, AdjustedIntervalsContainUnadjusted) {
    for (unsigned s = 0; s < 10; ++s) {
        const auto g = three_conditions(s, 12);
        const auto adj = pairwise_diffs_bonferroni(g, 0.05, s, 2000);
        const auto raw = pairwise_diffs(g, 0.95, s, 2000);
        for (std::size_t k = 0; k < adj.size(); ++k) {
            EXPECT_LE(adj[k].ci.lower, raw[k].ci.lower);
            EXPECT_GE(adj[k].ci.upper, raw[k].ci.upper);
        }
    }
}

TEST(Bonferroni, UnpairedParticipantRejected) {
    auto g = three_conditions(4);
    g["iconic"].erase("p3");
    try {
        pairwise_diffs_bonferroni(g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnpairedParticipant);
    }
    EXPECT_THROW(pairwise_diffs_bonferroni(GroupMeans{{"only", {{"p", 1.0}}}}), Error);
}

TEST(Summary, RandomAnswererExcludedUnderRefined) {
    auto rows = synthetic::participant_log({"good", ChartKind::Bar, 1, 2, 0});
    const auto coin = synthetic::participant_log({"coin", ChartKind::Bar, 2, 30, 0});
    rows.insert(rows.end(), coin.begin(), coin.end());
    const auto refined = summarize_trials(rows, {}, PolicyVariant::Refined);
    EXPECT_EQ(refined.included, std::vector<std::string>{"good"});
    EXPECT_EQ(refined.excluded, std::vector<std::string>{"coin"});
    EXPECT_DOUBLE_EQ(refined.overall_accuracy.at("coin"), 0.5);
    const auto original = summarize_trials(rows, {}, PolicyVariant::Original);
    EXPECT_EQ(original.included.size(), 2u);
}

TEST(Summary, TimeoutCountedAndAbsentFromRt) {
    std::set<int> late;
    const auto rows = synthetic::participant_log({"p", ChartKind::Pie, 5, 0, 1}, nullptr, &late);
    ASSERT_EQ(late.size(), 1u);
    const auto s = summarize_trials(rows);
    std::size_t timeouts = 0, rt_trials = 0;
    for (const auto& c : s.conditions) {
        timeouts += c.timeouts;
        rt_trials += c.rt_trials;
    }
    EXPECT_EQ(timeouts, 1u);
    EXPECT_EQ(rt_trials, 59u);
}

TEST(Summary, OverrunWithinGraceCountsCorrectButLeavesRt) {
    auto rows = synthetic::participant_log({"p", ChartKind::Bar, 6, 0, 0});
    rows[10].response_ms = 5004.0;
    ASSERT_TRUE(rows[10].correct);
    const auto s = summarize_trials(rows);
    EXPECT_DOUBLE_EQ(s.overall_accuracy.at("p"), 1.0);
    const auto* c = s.find({rows[10].chart, rows[10].fill});
    ASSERT_NE(c, nullptr);
    EXPECT_EQ(c->overruns, 1u);
    EXPECT_EQ(c->rt_trials, 19u);

    ExclusionPolicy keep;
    keep.include_overrun_in_rt = true;
    EXPECT_EQ(summarize_trials(rows, keep).find({rows[10].chart, rows[10].fill})->rt_trials, 20u);
}

TEST(Summary, FixtureMeansAreExact) {
    std::set<int> wrong;
    const synthetic::Plan plan{"p", ChartKind::Bar, 8, 4, 0, 900.0};
    const auto rows = synthetic::participant_log(plan, &wrong);
    const auto s = summarize_trials(rows);
    for (const auto& c : s.conditions) {
        double sum = 0;
        int n = 0, ok = 0, total = 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].fill != c.condition.fill) continue;
            ++total;
            if (wrong.contains(static_cast<int>(i))) continue;
            ++ok;
            sum += synthetic::rt_of(plan, static_cast<int>(i));
            ++n;
        }
        EXPECT_DOUBLE_EQ(c.accuracy, static_cast<double>(ok) / total);
        EXPECT_DOUBLE_EQ(*c.mean_rt_ms, sum / n);
    }
}

TEST(Summary, VariantsAgreeWithoutExclusionsOrTimeouts) {
    std::vector<TrialRecord> rows;
    for (int p = 0; p < 6; ++p) {
        const auto more = synthetic::participant_log({"p" + std::to_string(p), ChartKind::Pie,
                                                      static_cast<std::uint64_t>(p), p, 0, 800.0 + 50 * p});
        rows.insert(rows.end(), more.begin(), more.end());
    }
    const auto a = summarize_trials(rows, {}, PolicyVariant::Original);
    const auto b = summarize_trials(rows, {}, PolicyVariant::Refined);
    EXPECT_TRUE(b.excluded.empty());
    ASSERT_EQ(a.conditions.size(), b.conditions.size());
    for (std::size_t k = 0; k < a.conditions.size(); ++k) {
        EXPECT_EQ(a.conditions[k].accuracy, b.conditions[k].accuracy);
        EXPECT_EQ(a.conditions[k].mean_rt_ms, b.conditions[k].mean_rt_ms);
    }
}

TEST(Summary, EmptyAfterExclusion) {
    const auto rows = synthetic::participant_log({"coin", ChartKind::Bar, 2, 30, 0});
    try {
        summarize_trials(rows);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EmptyAfterExclusion);
    }
    EXPECT_THROW(summarize_trials({}), Error);
}

TEST(RankFirst, CountsSumToParticipants) {
    std::vector<RatingRecord> rows;
    const std::array<std::string, 4> designs{"BG1", "BG2", "BI1", "BI2"};
    for (int p = 0; p < 53; ++p)
        for (int d = 0; d < 4; ++d) {
            RatingRecord r{"p" + std::to_string(p), designs[static_cast<std::size_t>(d)], {4, 4, 4, 4, 4}, 3, false};
            r.rank_first = d == p % 4;
            rows.push_back(r);
        }
    const auto counts = rank_first_counts(rows);
    int total = 0;
    for (const auto& [id, n] : counts) total += n;
    EXPECT_EQ(total, 53);
    EXPECT_EQ(counts.at("BG1"), 14);
}

TEST(RankFirst, NoneRankedGivesZeros) {
    const std::vector<RatingRecord> rows{{"a", "PG1", {1, 2, 3, 4, 5}, 1, false}, {"a", "PG2", {1, 2, 3, 4, 5}, 1, false}};
    EXPECT_EQ(rank_first_counts(rows), (std::map<std::string, int>{{"PG1", 0}, {"PG2", 0}}));
}

TEST(RankFirst, AlwaysFirstDesignCountsEveryone) {
    std::vector<RatingRecord> rows;
    for (int p = 0; p < 9; ++p) {
        rows.push_back({"p" + std::to_string(p), "X1", {5, 5, 5, 5, 5}, 2, true});
        rows.push_back({"p" + std::to_string(p), "X2", {3, 3, 3, 3, 3}, 2, false});
    }
    EXPECT_EQ(rank_first_counts(rows).at("X1"), 9);
}

TEST(RankFirst, DuplicateWithinBlockRejected) {
    const std::vector<RatingRecord> rows{{"a", "BG1", {4, 4, 4, 4, 4}, 1, true}, {"a", "BG2", {4, 4, 4, 4, 4}, 1, true}};
    try {
        rank_first_counts(rows);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DuplicateRankFirst);
    }
}

TEST(Report, TrialsReportListsConditionsAndComparisons) {
    std::vector<TrialRecord> rows;
    for (int p = 0; p < 4; ++p) {
        const auto more =
            synthetic::participant_log({"p" + std::to_string(p), ChartKind::Bar, static_cast<std::uint64_t>(p + 1), p});
        rows.insert(rows.end(), more.begin(), more.end());
    }
    const auto report = trials_report(summarize_trials(rows), {500, 0.05, 1});
    EXPECT_EQ(report.at("variant"), "refined");
    EXPECT_EQ(report.at("conditions").size(), 3u);
    EXPECT_EQ(report.at("comparisons")[0].at("comparisons").size(), 3u);
    EXPECT_EQ(report, trials_report(summarize_trials(rows), {500, 0.05, 1}));
    const auto table = csv::parse(intervals_csv(report));
    EXPECT_EQ(table.size(), 7u);
}

TEST(Report, RatingsReportHasDesignMeans) {
    std::vector<RatingRecord> rows;
    for (int p = 0; p < 5; ++p) {
        rows.push_back({"p" + std::to_string(p), "PG1", {6, 6, 6, 6, 6}, 2, true});
        rows.push_back({"p" + std::to_string(p), "PG2", {2, 3, 4, 3, 3}, 5, false});
    }
    const auto report = ratings_report(rows, {400, 0.05, 2});
    ASSERT_EQ(report.at("designs").size(), 2u);
    EXPECT_DOUBLE_EQ(report.at("designs")[0].at("beauvis_mean").get<double>(), 6.0);
    EXPECT_DOUBLE_EQ(report.at("designs")[1].at("beauvis_mean").get<double>(), 3.0);
    EXPECT_EQ(report.at("rank_first").at("PG1"), 5);
    EXPECT_TRUE(report.at("comparisons")[0].at("comparisons")[0].at("excludes_zero").get<bool>());
}
