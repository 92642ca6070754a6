#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "malfam/errors.hpp"
#include "malfam/metrics.hpp"
#include "support/naive_metrics.hpp"

using namespace malfam;
using malfam::testing::naive_metrics;
using malfam::testing::NaiveScores;

namespace {

MetricsReport report_of(const std::map<std::string, std::optional<FamilyLabel>>& preds,
                        const std::vector<GoldRecord>& gold, bool merge,
                        bool include_zero_support = false) {
    return macro_metrics(confusion_matrix(preds, gold, merge), include_zero_support);
}

}  // namespace

TEST_CASE("two-class worked example: macro-F1 is 11/15") {
    std::vector<GoldRecord> gold = {{"1", FamilyLabel::Worm},
                                    {"2", FamilyLabel::Worm},
                                    {"3", FamilyLabel::Virus},
                                    {"4", FamilyLabel::Virus}};
    std::map<std::string, std::optional<FamilyLabel>> preds = {
        {"1", FamilyLabel::Worm},
        {"2", FamilyLabel::Virus},
        {"3", FamilyLabel::Virus},
        {"4", FamilyLabel::Virus}};
    MetricsReport report = report_of(preds, gold, true);
    CHECK(std::abs(report.macro_f1 - 0.73333333333333) <= 1e-9);
    CHECK(report.accuracy == doctest::Approx(0.75));
    // class Worm: P=1, R=0.5, F1=2/3; class Virus: P=2/3, R=1, F1=0.8
    for (const auto& [name, cm] : report.per_class) {
        if (name == "Worm") {
            CHECK(cm.precision == doctest::Approx(1.0));
            CHECK(cm.recall == doctest::Approx(0.5));
            CHECK(cm.f1 == doctest::Approx(2.0 / 3.0));
        }
        if (name == "Virus") {
            CHECK(cm.precision == doctest::Approx(2.0 / 3.0));
            CHECK(cm.recall == doctest::Approx(1.0));
            CHECK(cm.f1 == doctest::Approx(0.8));
        }
    }
}

TEST_CASE("perfect predictions give identity confusion and unit macros") {
    std::vector<GoldRecord> gold;
    std::map<std::string, std::optional<FamilyLabel>> preds;
    int i = 0;
    for (FamilyLabel f : all_families()) {
        std::string id = "s" + std::to_string(i++);
        gold.push_back({id, f});
        preds[id] = f;
    }
    MetricsReport report = report_of(preds, gold, false);
    CHECK(report.accuracy == 1.0);
    CHECK(report.macro_precision == 1.0);
    CHECK(report.macro_recall == 1.0);
    CHECK(report.macro_f1 == 1.0);
    CHECK(report.n_samples == 10);
}

TEST_CASE("merged equivalence: Trojan prediction on Backdoor gold is on-diagonal") {
    std::vector<GoldRecord> gold = {{"s1", FamilyLabel::BackdoorRat}};
    std::map<std::string, std::optional<FamilyLabel>> preds = {{"s1", FamilyLabel::Trojan}};
    ConfusionMatrix merged = confusion_matrix(preds, gold, true);
    CHECK(merged.classes.size() == 9);
    CHECK(merged.counts[0][0] == 1);  // merged class sits in slot 0
    MetricsReport report = macro_metrics(merged);
    CHECK(report.accuracy == 1.0);

    ConfusionMatrix distinct = confusion_matrix(preds, gold, false);
    CHECK(distinct.classes.size() == 10);
    CHECK(macro_metrics(distinct).accuracy == 0.0);
}

TEST_CASE("reference gold distribution reproduces its supports when preds equal gold") {
    const std::vector<std::pair<FamilyLabel, int>> counts = {
        {FamilyLabel::Trojan, 82},          {FamilyLabel::BackdoorRat, 44},
        {FamilyLabel::SpywareInfostealer, 42}, {FamilyLabel::Downloader, 11},
        {FamilyLabel::Worm, 6},             {FamilyLabel::BotBotnetClient, 5},
        {FamilyLabel::Ransomware, 4},       {FamilyLabel::Dropper, 4},
        {FamilyLabel::PackedObfuscated, 2},
    };
    std::vector<GoldRecord> gold;
    std::map<std::string, std::optional<FamilyLabel>> preds;
    int i = 0;
    for (const auto& [family, count] : counts) {
        for (int k = 0; k < count; ++k) {
            std::string id = "s" + std::to_string(i++);
            gold.push_back({id, family});
            preds[id] = family;
        }
    }
    MetricsReport report = report_of(preds, gold, true);
    CHECK(report.n_samples == 200);
    CHECK(report.accuracy == 1.0);
    std::map<std::string, std::int64_t> supports;
    for (const auto& [name, cm] : report.per_class) {
        supports[name] = cm.support;
    }
    CHECK(supports["Trojan + Backdoor/RAT"] == 126);
    CHECK(supports["Spyware / Infostealer"] == 42);
    CHECK(supports["Downloader"] == 11);
    CHECK(supports["Worm"] == 6);
    CHECK(supports["Bot / Botnet Client"] == 5);
    CHECK(supports["Ransomware"] == 4);
    CHECK(supports["Dropper"] == 4);
    CHECK(supports["Packed / Obfuscated Malware"] == 2);
    CHECK(supports["Virus"] == 0);
}

TEST_CASE("zero-support classes contribute FP only and stay out of macros by default") {
    std::vector<GoldRecord> gold = {{"s1", FamilyLabel::Worm}, {"s2", FamilyLabel::Worm}};
    std::map<std::string, std::optional<FamilyLabel>> preds = {
        {"s1", FamilyLabel::Worm}, {"s2", FamilyLabel::Ransomware}};
    MetricsReport excluded = report_of(preds, gold, true);
    // only Worm has support; its P=1, R=0.5, F1=2/3 are the macros
    CHECK(excluded.macro_precision == doctest::Approx(1.0));
    CHECK(excluded.macro_recall == doctest::Approx(0.5));
    CHECK(excluded.macro_f1 == doctest::Approx(2.0 / 3.0));

    MetricsReport included = report_of(preds, gold, true, true);
    CHECK(included.macro_f1 < excluded.macro_f1);  // diluted by empty classes
    // cross-check against the naive scorer in both conventions
    NaiveScores naive = naive_metrics(preds, gold, true, true);
    CHECK(std::abs(included.macro_f1 - naive.macro_f1) <= 1e-12);
}

TEST_CASE("invalid predictions are scored as wrong, never dropped") {
    std::vector<GoldRecord> gold = {{"s1", FamilyLabel::Worm}, {"s2", FamilyLabel::Virus}};
    std::map<std::string, std::optional<FamilyLabel>> preds = {
        {"s1", FamilyLabel::Worm}, {"s2", std::nullopt}};
    ConfusionMatrix confusion = confusion_matrix(preds, gold, false);
    CHECK(confusion.n_samples() == 2);
    CHECK(confusion.invalid_count() == 1);
    CHECK(macro_metrics(confusion).accuracy == doctest::Approx(0.5));
}

TEST_CASE("brute-force equivalence on random prediction/gold sets") {
    std::mt19937_64 rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 1 + rng() % 50;
        bool merge = rng() % 2 == 0;
        std::vector<GoldRecord> gold;
        std::map<std::string, std::optional<FamilyLabel>> preds;
        for (std::size_t i = 0; i < n; ++i) {
            std::string id = "s" + std::to_string(i);
            gold.push_back({id, static_cast<FamilyLabel>(rng() % kFamilyCount)});
            if (rng() % 10 == 0) {
                preds[id] = std::nullopt;  // invalid output
            } else {
                preds[id] = static_cast<FamilyLabel>(rng() % kFamilyCount);
            }
        }
        MetricsReport report = report_of(preds, gold, merge);
        NaiveScores naive = naive_metrics(preds, gold, merge, false);
        CHECK(std::abs(report.accuracy - naive.accuracy) <= 1e-12);
        CHECK(std::abs(report.macro_precision - naive.macro_p) <= 1e-12);
        CHECK(std::abs(report.macro_recall - naive.macro_r) <= 1e-12);
        CHECK(std::abs(report.macro_f1 - naive.macro_f1) <= 1e-12);

        // accuracy equals diagonal mass over n
        std::int64_t diag = 0;
        for (std::size_t c = 0; c < report.confusion.classes.size(); ++c) {
            diag += report.confusion.counts[c][c];
        }
        CHECK(report.accuracy ==
              doctest::Approx(double(diag) / double(n)).epsilon(1e-12));
    }
}

TEST_CASE("permuting sample order changes no metric") {
    std::mt19937_64 rng(11);
    std::vector<GoldRecord> gold;
    std::map<std::string, std::optional<FamilyLabel>> preds;
    for (std::size_t i = 0; i < 40; ++i) {
        std::string id = "s" + std::to_string(i);
        gold.push_back({id, static_cast<FamilyLabel>(rng() % kFamilyCount)});
        preds[id] = static_cast<FamilyLabel>(rng() % kFamilyCount);
    }
    MetricsReport base = report_of(preds, gold, true);
    std::shuffle(gold.begin(), gold.end(), rng);
    MetricsReport shuffled = report_of(preds, gold, true);
    CHECK(base.accuracy == shuffled.accuracy);
    CHECK(base.macro_f1 == shuffled.macro_f1);
    CHECK(base.confusion.counts == shuffled.confusion.counts);
}

TEST_CASE("with merge on, relabeling Trojan and Backdoor/RAT changes no metric") {
    std::mt19937_64 rng(12);
    std::vector<GoldRecord> gold;
    std::map<std::string, std::optional<FamilyLabel>> preds;
    std::map<std::string, std::optional<FamilyLabel>> relabeled;
    for (std::size_t i = 0; i < 60; ++i) {
        std::string id = "s" + std::to_string(i);
        gold.push_back({id, static_cast<FamilyLabel>(rng() % kFamilyCount)});
        auto p = static_cast<FamilyLabel>(rng() % kFamilyCount);
        preds[id] = p;
        if (p == FamilyLabel::Trojan) {
            relabeled[id] = FamilyLabel::BackdoorRat;
        } else if (p == FamilyLabel::BackdoorRat) {
            relabeled[id] = FamilyLabel::Trojan;
        } else {
            relabeled[id] = p;
        }
    }
    MetricsReport base = report_of(preds, gold, true);
    MetricsReport swapped = report_of(relabeled, gold, true);
    CHECK(base.accuracy == swapped.accuracy);
    CHECK(base.macro_precision == swapped.macro_precision);
    CHECK(base.macro_recall == swapped.macro_recall);
    CHECK(base.macro_f1 == swapped.macro_f1);
    CHECK(base.confusion.counts == swapped.confusion.counts);
}

TEST_CASE("cohen kappa reference values") {
    CHECK(cohen_kappa({"A", "B", "C", "A"}, {"A", "B", "C", "A"}) == 1.0);

    double zero = cohen_kappa({"A", "A", "B", "B"}, {"A", "B", "A", "B"});
    CHECK(std::abs(zero) <= 1e-12);

    double disjoint = cohen_kappa({"A", "A", "A", "A"}, {"B", "B", "B", "B"});
    CHECK(disjoint < 0.0);

    // direct evaluation of the pooled-chance formula
    // p_o = 0; pooled q(A) = q(B) = 0.5; p_e = 0.5; kappa = -1
    CHECK(std::abs(disjoint - (0.0 - 0.5) / (1.0 - 0.5)) <= 1e-12);

    CHECK_THROWS_AS(cohen_kappa({"A"}, {"A", "B"}), DataError);
    CHECK_THROWS_AS(cohen_kappa({}, {}), DataError);
}

TEST_CASE("cohen kappa per-rater marginals variant") {
    // Classical per-rater chance model: same on the balanced example,
    // different on the disjoint-constant case (0 instead of negative).
    CHECK(std::abs(cohen_kappa({"A", "A", "B", "B"}, {"A", "B", "A", "B"},
                               KappaMarginals::PerRater)) <= 1e-12);
    CHECK(cohen_kappa({"A", "A", "A", "A"}, {"B", "B", "B", "B"},
                      KappaMarginals::PerRater) == 0.0);
    CHECK(cohen_kappa({"X", "X"}, {"X", "X"}, KappaMarginals::PerRater) == 1.0);
}

TEST_CASE("metrics report survives a json round trip") {
    std::vector<GoldRecord> gold = {{"s1", FamilyLabel::Worm}, {"s2", FamilyLabel::Virus}};
    std::map<std::string, std::optional<FamilyLabel>> preds = {
        {"s1", FamilyLabel::Worm}, {"s2", FamilyLabel::Worm}};
    MetricsReport report = report_of(preds, gold, true);
    MetricsReport back = metrics_from_json(metrics_to_json(report));
    CHECK(back.accuracy == report.accuracy);
    CHECK(back.macro_f1 == report.macro_f1);
    CHECK(back.confusion.counts == report.confusion.counts);
    CHECK(back.per_class.size() == report.per_class.size());
}
