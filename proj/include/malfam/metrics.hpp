#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "malfam/calibration.hpp"
#include "malfam/taxonomy.hpp"

namespace malfam {

/// Row = gold class, column = predicted class; the trailing extra column
/// tallies invalid predictions, which are wrong for every gold class.
struct ConfusionMatrix {
    static constexpr std::string_view kInvalidColumn = "(invalid)";

    std::vector<std::string> classes;  // evaluation classes, canonical order
    std::vector<std::vector<std::int64_t>> counts;  // classes.size() x (classes.size()+1)
    bool merged = false;

    std::int64_t n_samples() const;
    std::int64_t invalid_count() const;
    std::int64_t support(std::size_t class_index) const;
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::int64_t support = 0;
};

struct MetricsReport {
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    std::vector<std::pair<std::string, ClassMetrics>> per_class;
    ConfusionMatrix confusion;
    std::int64_t n_samples = 0;
};

/// Display names of the evaluation classes: the 10 families, or 9 when the
/// Trojan≡Backdoor merge is applied.
std::vector<std::string> evaluation_class_names(bool merge_equivalent);

/// Tallies predictions against gold. A missing map entry or std::nullopt is
/// an invalid prediction. With merge_equivalent set, Trojan and Backdoor/RAT
/// collapse into one class before counting.
ConfusionMatrix confusion_matrix(
    const std::map<std::string, std::optional<FamilyLabel>>& preds,
    const std::vector<GoldRecord>& gold, bool merge_equivalent);

/// Per-class precision/recall/F1 (zero when the denominator is zero) and
/// their unweighted means. Macros average over classes with gold support by
/// default; include_zero_support widens them to every class.
MetricsReport macro_metrics(const ConfusionMatrix& confusion,
                            bool include_zero_support = false);

enum class KappaMarginals : std::uint8_t {
    Pooled = 0,   // chance model from label frequencies pooled across both raters
    PerRater,     // each rater's own marginal distribution
};

/// Chance-corrected agreement (p_o - p_e) / (1 - p_e) between two aligned
/// label lists. Returns 1 when both p_o and p_e are 1. Length mismatch or
/// empty input throws DataError.
double cohen_kappa(const std::vector<std::string>& labels_a,
                   const std::vector<std::string>& labels_b,
                   KappaMarginals marginals = KappaMarginals::Pooled);

nlohmann::json metrics_to_json(const MetricsReport& report);
MetricsReport metrics_from_json(const nlohmann::json& doc);

/// One aligned table in the layout of the evaluation summaries: one row per
/// unit (model or ensemble), columns Accuracy / Macro-P / Macro-R / Macro-F1.
std::string render_metrics_table(
    const std::vector<std::pair<std::string, MetricsReport>>& rows);

/// Per-class breakdown plus the confusion matrix for a single unit.
std::string render_class_breakdown(const MetricsReport& report);

}  // namespace malfam
