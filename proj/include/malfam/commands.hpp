#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "malfam/metrics.hpp"
#include "malfam/run_config.hpp"

namespace malfam {

/// One line of the predictions file: a (sample, judge) pair with the raw
/// model output and its normalization verdict.
struct PredictionRow {
    std::string sample_id;
    std::string model_id;
    std::string prompt_id;
    std::string raw_text;
    std::optional<FamilyLabel> label;
    InvalidReason invalid_reason = InvalidReason::None;
    bool ok = true;
    std::string error;
    bool from_cache = false;
    double latency_ms = 0.0;

    nlohmann::json to_json() const;
    static PredictionRow from_json(const nlohmann::json& doc);
};

std::vector<PredictionRow> load_predictions(const std::filesystem::path& path);
void save_predictions(const std::filesystem::path& path,
                      const std::vector<PredictionRow>& rows);

/// One line of the decisions file: the ensemble outcome for one sample.
struct DecisionRow {
    std::string sample_id;
    EnsembleDecision decision;

    nlohmann::json to_json() const;
    static DecisionRow from_json(const nlohmann::json& doc);
};

std::vector<DecisionRow> load_decisions(const std::filesystem::path& path);
void save_decisions(const std::filesystem::path& path, const std::vector<DecisionRow>& rows);

/// Calibration output: per-model metric values, the normalized weights, and
/// which gold samples the calibration saw.
struct WeightsFile {
    CalibrationMetric metric = CalibrationMetric::Accuracy;
    std::map<std::string, double> metric_values;
    WeightVector weights;
    std::vector<std::string> calibration_sample_ids;

    nlohmann::json to_json() const;
    static WeightsFile from_json(const nlohmann::json& doc);
    static WeightsFile load(const std::filesystem::path& path);
    void save(const std::filesystem::path& path) const;
};

/// Deterministic calibration subset: gold ids ordered by id hash, first
/// floor(fraction * n) taken (at least one).
std::vector<GoldRecord> calibration_split(const std::vector<GoldRecord>& gold,
                                          double fraction);

// Pipeline stages. Each throws ConfigError / DataError / ProviderError on
// failure and writes its outputs atomically under the configured paths.
void cmd_predict(const RunConfig& config);
void cmd_calibrate(const RunConfig& config);
void cmd_ensemble(const RunConfig& config);
void cmd_evaluate(const RunConfig& config);
void cmd_sweep(const RunConfig& config, const std::vector<std::string>& prompt_ids);
void cmd_report(const RunConfig& config, const std::filesystem::path& report_path,
                bool per_class);

/// Convenience for tests and the acceptance suite: predict + calibrate +
/// ensemble + evaluate in sequence.
void run_pipeline(const RunConfig& config);

}  // namespace malfam
