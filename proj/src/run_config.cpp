#include "malfam/run_config.hpp"

#include "malfam/errors.hpp"
#include "malfam/util.hpp"

namespace malfam {

namespace {

template <typename Enum>
Enum parse_enum(std::optional<Enum> value, const std::string& field, const std::string& text) {
    if (!value) {
        throw ConfigError("invalid value '" + text + "' for " + field);
    }
    return *value;
}

}  // namespace

std::string_view to_string(EnsembleMode mode) {
    switch (mode) {
        case EnsembleMode::Uniform: return "uniform";
        case EnsembleMode::Weighted: return "weighted";
        case EnsembleMode::WeightedHierarchical: return "weighted_hierarchical";
    }
    return "weighted_hierarchical";
}

std::optional<EnsembleMode> ensemble_mode_from_string(std::string_view text) {
    if (text == "uniform") return EnsembleMode::Uniform;
    if (text == "weighted") return EnsembleMode::Weighted;
    if (text == "weighted_hierarchical") return EnsembleMode::WeightedHierarchical;
    return std::nullopt;
}

std::string_view to_string(MajorityDenominator denominator) {
    return denominator == MajorityDenominator::ValidVoters ? "valid_voters" : "all_models";
}

std::optional<MajorityDenominator> denominator_from_string(std::string_view text) {
    if (text == "valid_voters") return MajorityDenominator::ValidVoters;
    if (text == "all_models") return MajorityDenominator::AllModels;
    return std::nullopt;
}

RunConfig RunConfig::from_json(const nlohmann::json& doc) {
    RunConfig config;
    try {
        if (doc.contains("judges")) {
            for (const auto& j : doc.at("judges")) {
                JudgeConfig judge;
                judge.model_id = j.at("model_id").get<std::string>();
                judge.endpoint = j.value("endpoint", "");
                judge.auth_env = j.value("auth_env", "");
                judge.timeout_ms = j.value("timeout_ms", 60000);
                judge.max_retries = j.value("max_retries", 2);
                judge.temperature = j.value("temperature", 0.0);
                if (j.contains("max_input_chars")) {
                    judge.max_input_chars = j.at("max_input_chars").get<std::size_t>();
                }
                config.judges.push_back(std::move(judge));
            }
        }
        config.prompt_id = doc.value("prompt_id", config.prompt_id);
        if (doc.contains("ensemble_mode")) {
            std::string text = doc.at("ensemble_mode").get<std::string>();
            config.ensemble_mode =
                parse_enum(ensemble_mode_from_string(text), "ensemble_mode", text);
        }
        if (doc.contains("calibration_metric")) {
            std::string text = doc.at("calibration_metric").get<std::string>();
            config.calibration_metric =
                parse_enum(calibration_metric_from_string(text), "calibration_metric", text);
        }
        if (doc.contains("majority_denominator")) {
            std::string text = doc.at("majority_denominator").get<std::string>();
            config.denominator =
                parse_enum(denominator_from_string(text), "majority_denominator", text);
        }
        if (doc.contains("call_mode")) {
            std::string text = doc.at("call_mode").get<std::string>();
            config.call_mode = parse_enum(call_mode_from_string(text), "call_mode", text);
        }
        config.merge_equivalent = doc.value("merge_equivalent", config.merge_equivalent);
        config.include_zero_support =
            doc.value("include_zero_support", config.include_zero_support);
        config.held_out_only = doc.value("held_out_only", config.held_out_only);
        config.split_fraction = doc.value("split_fraction", config.split_fraction);
        if (doc.contains("concurrency")) {
            const auto& c = doc.at("concurrency");
            config.per_provider_limit = c.value("per_provider", config.per_provider_limit);
            config.global_limit = c.value("global", config.global_limit);
            config.backoff_base_ms = c.value("backoff_base_ms", config.backoff_base_ms);
        }
        if (doc.contains("paths")) {
            const auto& p = doc.at("paths");
            config.paths.samples = p.value("samples", std::string());
            config.paths.gold = p.value("gold", std::string());
            config.paths.cache = p.value("cache", std::string());
            config.paths.weights = p.value("weights", std::string());
            config.paths.predictions = p.value("predictions", std::string());
            config.paths.decisions = p.value("decisions", std::string());
            config.paths.out_dir = p.value("out_dir", std::string("out"));
            config.paths.taxonomy = p.value("taxonomy", std::string());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("invalid run config: ") + e.what());
    }
    if (config.split_fraction <= 0.0 || config.split_fraction > 1.0) {
        throw ConfigError("split_fraction must lie in (0, 1]");
    }
    return config;
}

RunConfig RunConfig::load(const std::filesystem::path& config_path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(config_path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + config_path.string() + ": " + e.what());
    }
    return from_json(doc);
}

nlohmann::json RunConfig::to_json() const {
    nlohmann::json judges = nlohmann::json::array();
    for (const JudgeConfig& judge : this->judges) {
        nlohmann::json j{
            {"model_id", judge.model_id},
            {"endpoint", judge.endpoint},
            {"auth_env", judge.auth_env},
            {"timeout_ms", judge.timeout_ms},
            {"max_retries", judge.max_retries},
            {"temperature", judge.temperature},
        };
        if (judge.max_input_chars) {
            j["max_input_chars"] = *judge.max_input_chars;
        }
        judges.push_back(std::move(j));
    }
    return nlohmann::json{
        {"judges", judges},
        {"prompt_id", prompt_id},
        {"ensemble_mode", std::string(to_string(ensemble_mode))},
        {"calibration_metric", std::string(to_string(calibration_metric))},
        {"majority_denominator", std::string(to_string(denominator))},
        {"call_mode", std::string(to_string(call_mode))},
        {"merge_equivalent", merge_equivalent},
        {"include_zero_support", include_zero_support},
        {"held_out_only", held_out_only},
        {"split_fraction", split_fraction},
        {"concurrency",
         {{"per_provider", per_provider_limit},
          {"global", global_limit},
          {"backoff_base_ms", backoff_base_ms}}},
        {"paths",
         {{"samples", paths.samples.generic_string()},
          {"gold", paths.gold.generic_string()},
          {"cache", paths.cache.generic_string()},
          {"weights", paths.weights.generic_string()},
          {"predictions", paths.predictions.generic_string()},
          {"decisions", paths.decisions.generic_string()},
          {"out_dir", paths.out_dir.generic_string()},
          {"taxonomy", paths.taxonomy.generic_string()}}},
    };
}

std::uint64_t RunConfig::config_hash() const {
    nlohmann::json doc = to_json();
    doc.erase("paths");
    return fnv1a64(doc.dump());
}

Taxonomy RunConfig::taxonomy() const {
    if (paths.taxonomy.empty()) {
        return Taxonomy::defaults();
    }
    return Taxonomy::load(paths.taxonomy);
}

GatewayOptions RunConfig::gateway_options() const {
    GatewayOptions options;
    options.per_provider_limit = per_provider_limit;
    options.global_limit = global_limit;
    options.backoff_base_ms = backoff_base_ms;
    options.provider_factory = provider_factory;
    return options;
}

std::filesystem::path RunConfig::predictions_path() const {
    return paths.predictions.empty() ? paths.out_dir / "predictions.jsonl"
                                     : paths.predictions;
}

std::filesystem::path RunConfig::decisions_path() const {
    return paths.decisions.empty() ? paths.out_dir / "decisions.jsonl" : paths.decisions;
}

std::filesystem::path RunConfig::weights_path() const {
    return paths.weights.empty() ? paths.out_dir / "weights.json" : paths.weights;
}

}  // namespace malfam
