#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "malfam/calibration.hpp"
#include "malfam/ensemble.hpp"
#include "malfam/gateway.hpp"
#include "malfam/taxonomy.hpp"

namespace malfam {

enum class EnsembleMode : std::uint8_t {
    Uniform = 0,
    Weighted,
    WeightedHierarchical,
};

std::string_view to_string(EnsembleMode mode);
std::optional<EnsembleMode> ensemble_mode_from_string(std::string_view text);

std::string_view to_string(MajorityDenominator denominator);
std::optional<MajorityDenominator> denominator_from_string(std::string_view text);

struct RunPaths {
    std::filesystem::path samples;
    std::filesystem::path gold;
    std::filesystem::path cache;
    std::filesystem::path weights;      // defaults to out_dir/weights.json
    std::filesystem::path predictions;  // defaults to out_dir/predictions.jsonl
    std::filesystem::path decisions;    // defaults to out_dir/decisions.jsonl
    std::filesystem::path out_dir = "out";
    std::filesystem::path taxonomy;     // optional override file
};

/// Everything a pipeline run needs. Loadable from a JSON config file with
/// flag-level overrides on top; credentials stay in environment variables.
struct RunConfig {
    std::vector<JudgeConfig> judges;
    std::string prompt_id = "P0";
    EnsembleMode ensemble_mode = EnsembleMode::WeightedHierarchical;
    CalibrationMetric calibration_metric = CalibrationMetric::Accuracy;
    MajorityDenominator denominator = MajorityDenominator::ValidVoters;
    CallMode call_mode = CallMode::Replay;
    bool merge_equivalent = true;
    bool include_zero_support = false;
    bool held_out_only = false;     // evaluate only gold ids outside the calibration split
    double split_fraction = 1.0;    // share of gold used for calibration
    int per_provider_limit = 4;
    int global_limit = 8;
    int backoff_base_ms = 250;
    RunPaths paths;

    /// Test seam; not part of the serialized config.
    ProviderFactory provider_factory;

    static RunConfig from_json(const nlohmann::json& doc);
    static RunConfig load(const std::filesystem::path& config_path);
    nlohmann::json to_json() const;

    /// Digest of the behavioral fields (paths excluded, so identical runs
    /// into different directories share a hash).
    std::uint64_t config_hash() const;

    Taxonomy taxonomy() const;
    GatewayOptions gateway_options() const;

    std::filesystem::path predictions_path() const;
    std::filesystem::path decisions_path() const;
    std::filesystem::path weights_path() const;
};

}  // namespace malfam
