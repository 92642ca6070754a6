#pragma once

#include <map>
#include <string>
#include <vector>

#include "malfam/ensemble.hpp"
#include "malfam/taxonomy.hpp"

namespace malfam {

/// One human-labeled gold sample.
struct GoldRecord {
    std::string sample_id;
    FamilyLabel label;

    bool operator==(const GoldRecord&) const = default;
};

enum class CalibrationMetric : std::uint8_t {
    Accuracy = 0,
    MacroF1,
};

std::string_view to_string(CalibrationMetric metric);
std::optional<CalibrationMetric> calibration_metric_from_string(std::string_view text);

/// Trojan and Backdoor/RAT count as matching. The merged evaluation class is
/// represented by Trojan.
FamilyLabel evaluation_class(FamilyLabel family);
bool equivalent_labels(FamilyLabel a, FamilyLabel b);

/// Fraction of gold samples the model got right under the Trojan≡Backdoor
/// equivalence. Gold samples with no prediction entry (missing or invalid
/// output) count as incorrect. Empty gold set throws DataError.
double per_model_accuracy(const std::map<std::string, FamilyLabel>& preds,
                          const std::vector<GoldRecord>& gold);

/// w_i = metric_i / sum_j metric_j. Requires non-negative values with a
/// positive sum; all-zero input throws DataError.
WeightVector calibrate_weights(const std::map<std::string, double>& metric_values);

}  // namespace malfam
