#include "malfam/calibration.hpp"

#include "malfam/errors.hpp"

namespace malfam {

std::string_view to_string(CalibrationMetric metric) {
    return metric == CalibrationMetric::Accuracy ? "accuracy" : "macro_f1";
}

std::optional<CalibrationMetric> calibration_metric_from_string(std::string_view text) {
    if (text == "accuracy") return CalibrationMetric::Accuracy;
    if (text == "macro_f1") return CalibrationMetric::MacroF1;
    return std::nullopt;
}

FamilyLabel evaluation_class(FamilyLabel family) {
    return family == FamilyLabel::BackdoorRat ? FamilyLabel::Trojan : family;
}

bool equivalent_labels(FamilyLabel a, FamilyLabel b) {
    return evaluation_class(a) == evaluation_class(b);
}

double per_model_accuracy(const std::map<std::string, FamilyLabel>& preds,
                          const std::vector<GoldRecord>& gold) {
    if (gold.empty()) {
        throw DataError("per_model_accuracy: empty gold set");
    }
    std::size_t correct = 0;
    for (const GoldRecord& record : gold) {
        auto it = preds.find(record.sample_id);
        if (it != preds.end() && equivalent_labels(it->second, record.label)) {
            ++correct;
        }
    }
    return static_cast<double>(correct) / static_cast<double>(gold.size());
}

WeightVector calibrate_weights(const std::map<std::string, double>& metric_values) {
    double sum = 0.0;
    for (const auto& [id, value] : metric_values) {
        if (value < 0.0) {
            throw DataError("calibration metric for model '" + id + "' is negative");
        }
        sum += value;
    }
    if (sum <= 0.0) {
        throw DataError("calibration metrics are all zero; no weight normalization exists");
    }
    return WeightVector::normalized(metric_values);
}

}  // namespace malfam
