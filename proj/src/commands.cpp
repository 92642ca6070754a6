#include "malfam/commands.hpp"

#include <algorithm>
#include <iostream>
#include <set>

#include "malfam/errors.hpp"
#include "malfam/normalizer.hpp"
#include "malfam/prompt.hpp"
#include "malfam/util.hpp"

namespace malfam {

namespace {

void write_run_manifest(const RunConfig& config, const Taxonomy& taxonomy) {
    std::string cache_snapshot;
    if (!config.paths.cache.empty() && std::filesystem::exists(config.paths.cache)) {
        cache_snapshot = ResponseCache(config.paths.cache).snapshot_id();
    }
    nlohmann::json manifest{
        {"config_hash", to_hex(config.config_hash())},
        {"taxonomy_hash", to_hex(taxonomy.content_hash())},
        {"cache_snapshot_id", cache_snapshot},
    };
    atomic_write_file(config.paths.out_dir / "run_manifest.json", manifest.dump(2) + "\n");
}

std::vector<std::string> jsonl_lines(const std::filesystem::path& path) {
    std::vector<std::string> lines;
    for (const std::string& line : split_lines(read_file(path))) {
        if (!trim(line).empty()) {
            lines.push_back(line);
        }
    }
    return lines;
}

/// Valid predictions per model, keyed sample_id -> family. Invalid and
/// errored rows are simply absent, which downstream scoring counts as wrong.
std::map<std::string, std::map<std::string, FamilyLabel>> valid_predictions_by_model(
    const std::vector<PredictionRow>& rows) {
    std::map<std::string, std::map<std::string, FamilyLabel>> out;
    for (const PredictionRow& row : rows) {
        out.try_emplace(row.model_id);
        if (row.ok && row.label) {
            out[row.model_id][row.sample_id] = *row.label;
        }
    }
    return out;
}

std::map<std::string, std::optional<FamilyLabel>> outcome_map(
    const std::map<std::string, FamilyLabel>& valid) {
    std::map<std::string, std::optional<FamilyLabel>> out;
    for (const auto& [sample_id, label] : valid) {
        out[sample_id] = label;
    }
    return out;
}

double calibration_value(CalibrationMetric metric,
                         const std::map<std::string, FamilyLabel>& preds,
                         const std::vector<GoldRecord>& gold, bool merge_equivalent,
                         bool include_zero_support) {
    if (metric == CalibrationMetric::Accuracy) {
        return per_model_accuracy(preds, gold);
    }
    ConfusionMatrix confusion = confusion_matrix(outcome_map(preds), gold, merge_equivalent);
    return macro_metrics(confusion, include_zero_support).macro_f1;
}

std::vector<ModelPrediction> model_predictions_for_sample(
    const std::vector<PredictionRow>& rows) {
    std::vector<ModelPrediction> preds;
    for (const PredictionRow& row : rows) {
        NormalizedPrediction p;
        if (row.ok && row.label) {
            p = NormalizedPrediction::valid_of(*row.label, row.raw_text);
        } else if (row.ok) {
            p = NormalizedPrediction::invalid_of(row.invalid_reason, row.raw_text);
        } else {
            // Errored call: no output ever arrived.
            p = NormalizedPrediction::invalid_of(InvalidReason::Empty, "");
        }
        preds.push_back({row.model_id, std::move(p)});
    }
    return preds;
}

EnsembleDecision decide(const RunConfig& config, const std::vector<ModelPrediction>& preds,
                        const WeightVector& weights, const SpecificityTable& specificity) {
    switch (config.ensemble_mode) {
        case EnsembleMode::Uniform:
            return decide_flat(preds, WeightVector(), specificity, FlatMode::Uniform);
        case EnsembleMode::Weighted:
            return decide_flat(preds, weights, specificity, FlatMode::Weighted);
        case EnsembleMode::WeightedHierarchical:
            return decide_hierarchical(preds, weights, specificity, config.denominator);
    }
    throw ConfigError("unknown ensemble mode");
}

std::vector<DecisionRow> ensemble_decisions(const RunConfig& config,
                                            const std::vector<PredictionRow>& rows,
                                            const WeightVector& weights,
                                            const Taxonomy& taxonomy) {
    std::map<std::string, std::vector<PredictionRow>> by_sample;
    for (const PredictionRow& row : rows) {
        by_sample[row.sample_id].push_back(row);
    }
    std::vector<DecisionRow> decisions;
    decisions.reserve(by_sample.size());
    for (const auto& [sample_id, sample_rows] : by_sample) {
        DecisionRow row;
        row.sample_id = sample_id;
        row.decision = decide(config, model_predictions_for_sample(sample_rows), weights,
                              taxonomy.specificity);
        decisions.push_back(std::move(row));
    }
    return decisions;
}

WeightsFile calibrate_from_rows(const RunConfig& config,
                                const std::vector<PredictionRow>& rows,
                                const std::vector<GoldRecord>& gold_subset) {
    WeightsFile out;
    out.metric = config.calibration_metric;
    for (const auto& [model_id, preds] : valid_predictions_by_model(rows)) {
        out.metric_values[model_id] =
            calibration_value(config.calibration_metric, preds, gold_subset,
                              config.merge_equivalent, config.include_zero_support);
    }
    if (out.metric_values.empty()) {
        throw DataError("predictions file contains no models to calibrate");
    }
    out.weights = calibrate_weights(out.metric_values);
    for (const GoldRecord& record : gold_subset) {
        out.calibration_sample_ids.push_back(record.sample_id);
    }
    std::sort(out.calibration_sample_ids.begin(), out.calibration_sample_ids.end());
    return out;
}

MetricsReport unit_metrics(const std::map<std::string, std::optional<FamilyLabel>>& preds,
                           const std::vector<GoldRecord>& gold, const RunConfig& config) {
    ConfusionMatrix confusion = confusion_matrix(preds, gold, config.merge_equivalent);
    return macro_metrics(confusion, config.include_zero_support);
}

std::map<std::string, std::optional<FamilyLabel>> decision_outcomes(
    const std::vector<DecisionRow>& decisions) {
    std::map<std::string, std::optional<FamilyLabel>> out;
    for (const DecisionRow& row : decisions) {
        out[row.sample_id] = row.decision.label;
    }
    return out;
}

void check_ids_match(const std::vector<DecisionRow>& decisions,
                     const std::vector<GoldRecord>& gold) {
    std::set<std::string> decision_ids;
    for (const DecisionRow& row : decisions) {
        decision_ids.insert(row.sample_id);
    }
    std::set<std::string> gold_ids;
    for (const GoldRecord& record : gold) {
        gold_ids.insert(record.sample_id);
    }
    std::string missing;
    for (const std::string& id : gold_ids) {
        if (!decision_ids.count(id)) {
            missing += missing.empty() ? id : ", " + id;
        }
    }
    std::string extra;
    for (const std::string& id : decision_ids) {
        if (!gold_ids.count(id)) {
            extra += extra.empty() ? id : ", " + id;
        }
    }
    if (!missing.empty() || !extra.empty()) {
        std::string message = "gold/decision id mismatch:";
        if (!missing.empty()) message += "\n  gold ids without decisions: " + missing;
        if (!extra.empty()) message += "\n  decision ids not in gold: " + extra;
        throw DataError(message);
    }
}

}  // namespace

nlohmann::json PredictionRow::to_json() const {
    nlohmann::json doc{
        {"sample_id", sample_id},
        {"model_id", model_id},
        {"prompt_id", prompt_id},
        {"raw_text", raw_text},
        {"ok", ok},
        {"from_cache", from_cache},
        {"latency_ms", latency_ms},
    };
    if (label) {
        doc["label"] = std::string(display_name(*label));
    } else {
        doc["invalid_reason"] = std::string(to_string(invalid_reason));
    }
    if (!ok) {
        doc["error"] = error;
    }
    return doc;
}

PredictionRow PredictionRow::from_json(const nlohmann::json& doc) {
    PredictionRow row;
    row.sample_id = doc.at("sample_id").get<std::string>();
    row.model_id = doc.at("model_id").get<std::string>();
    row.prompt_id = doc.at("prompt_id").get<std::string>();
    row.raw_text = doc.at("raw_text").get<std::string>();
    row.ok = doc.value("ok", true);
    row.from_cache = doc.value("from_cache", false);
    row.latency_ms = doc.value("latency_ms", 0.0);
    row.error = doc.value("error", "");
    if (doc.contains("label")) {
        auto family = family_from_display(doc.at("label").get<std::string>());
        if (!family) {
            throw DataError("predictions row for sample '" + row.sample_id +
                            "' carries unknown label '" +
                            doc.at("label").get<std::string>() + "'");
        }
        row.label = family;
    } else {
        auto reason = invalid_reason_from_string(doc.value("invalid_reason", "unmappable"));
        row.invalid_reason = reason.value_or(InvalidReason::Unmappable);
    }
    return row;
}

std::vector<PredictionRow> load_predictions(const std::filesystem::path& path) {
    std::vector<PredictionRow> rows;
    for (const std::string& line : jsonl_lines(path)) {
        try {
            rows.push_back(PredictionRow::from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("invalid predictions file " + path.string() + ": " + e.what());
        }
    }
    return rows;
}

void save_predictions(const std::filesystem::path& path,
                      const std::vector<PredictionRow>& rows) {
    std::string out;
    for (const PredictionRow& row : rows) {
        out += row.to_json().dump();
        out += '\n';
    }
    atomic_write_file(path, out);
}

nlohmann::json DecisionRow::to_json() const {
    nlohmann::json family_scores = nlohmann::json::object();
    for (FamilyLabel f : all_families()) {
        double score = score_of(decision.family_scores, f);
        if (score > 0.0) {
            family_scores[std::string(display_name(f))] = score;
        }
    }
    nlohmann::json group_scores = nlohmann::json::object();
    for (BehaviorGroup g : all_groups()) {
        double score = score_of(decision.group_scores, g);
        if (score > 0.0) {
            group_scores[std::string(display_name(g))] = score;
        }
    }
    return nlohmann::json{
        {"sample_id", sample_id},
        {"label", decision.label ? std::string(display_name(*decision.label))
                                 : std::string("UNRESOLVED")},
        {"stage", std::string(to_string(decision.stage))},
        {"family_scores", family_scores},
        {"group_scores", group_scores},
        {"participating_models", decision.participating_models},
    };
}

DecisionRow DecisionRow::from_json(const nlohmann::json& doc) {
    DecisionRow row;
    row.sample_id = doc.at("sample_id").get<std::string>();
    std::string label = doc.at("label").get<std::string>();
    if (label != "UNRESOLVED") {
        auto family = family_from_display(label);
        if (!family) {
            throw DataError("decisions row for sample '" + row.sample_id +
                            "' carries unknown label '" + label + "'");
        }
        row.decision.label = family;
    }
    auto stage = stage_from_string(doc.at("stage").get<std::string>());
    if (!stage) {
        throw DataError("decisions row for sample '" + row.sample_id +
                        "' carries unknown stage");
    }
    row.decision.stage = *stage;
    for (const auto& [name, value] : doc.at("family_scores").items()) {
        auto family = family_from_display(name);
        if (family) {
            row.decision.family_scores[static_cast<std::size_t>(*family)] =
                value.get<double>();
        }
    }
    for (BehaviorGroup g : all_groups()) {
        std::string name(display_name(g));
        if (doc.at("group_scores").contains(name)) {
            row.decision.group_scores[static_cast<std::size_t>(g)] =
                doc.at("group_scores").at(name).get<double>();
        }
    }
    row.decision.participating_models =
        doc.at("participating_models").get<std::vector<std::string>>();
    return row;
}

std::vector<DecisionRow> load_decisions(const std::filesystem::path& path) {
    std::vector<DecisionRow> rows;
    for (const std::string& line : jsonl_lines(path)) {
        try {
            rows.push_back(DecisionRow::from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw DataError("invalid decisions file " + path.string() + ": " + e.what());
        }
    }
    return rows;
}

void save_decisions(const std::filesystem::path& path,
                    const std::vector<DecisionRow>& rows) {
    std::string out;
    for (const DecisionRow& row : rows) {
        out += row.to_json().dump();
        out += '\n';
    }
    atomic_write_file(path, out);
}

nlohmann::json WeightsFile::to_json() const {
    nlohmann::json models = nlohmann::json::object();
    for (const auto& [model_id, value] : metric_values) {
        models[model_id] = {
            {"metric_value", value},
            {"weight", weights.at(model_id)},
        };
    }
    return nlohmann::json{
        {"metric", std::string(to_string(metric))},
        {"models", models},
        {"calibration_sample_ids", calibration_sample_ids},
    };
}

WeightsFile WeightsFile::from_json(const nlohmann::json& doc) {
    WeightsFile out;
    auto metric = calibration_metric_from_string(doc.at("metric").get<std::string>());
    if (!metric) {
        throw ConfigError("weights file carries unknown metric");
    }
    out.metric = *metric;
    std::map<std::string, double> weights;
    for (const auto& [model_id, entry] : doc.at("models").items()) {
        out.metric_values[model_id] = entry.at("metric_value").get<double>();
        weights[model_id] = entry.at("weight").get<double>();
    }
    out.weights = WeightVector(std::move(weights));
    out.calibration_sample_ids =
        doc.value("calibration_sample_ids", std::vector<std::string>());
    return out;
}

WeightsFile WeightsFile::load(const std::filesystem::path& path) {
    try {
        return from_json(nlohmann::json::parse(read_file(path)));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("invalid weights file " + path.string() + ": " + e.what());
    }
}

void WeightsFile::save(const std::filesystem::path& path) const {
    atomic_write_file(path, to_json().dump(2) + "\n");
}

std::vector<GoldRecord> calibration_split(const std::vector<GoldRecord>& gold,
                                          double fraction) {
    if (gold.empty()) {
        throw DataError("calibration_split: empty gold set");
    }
    if (fraction >= 1.0) {
        return gold;
    }
    std::vector<GoldRecord> ordered = gold;
    std::sort(ordered.begin(), ordered.end(),
              [](const GoldRecord& a, const GoldRecord& b) {
                  return std::make_pair(fnv1a64(a.sample_id), a.sample_id) <
                         std::make_pair(fnv1a64(b.sample_id), b.sample_id);
              });
    std::size_t take = std::max<std::size_t>(
        1, static_cast<std::size_t>(fraction * static_cast<double>(ordered.size())));
    ordered.resize(take);
    return ordered;
}

void cmd_predict(const RunConfig& config) {
    if (config.judges.empty()) {
        throw ConfigError("predict: no judges configured");
    }
    Taxonomy taxonomy = config.taxonomy();
    std::vector<SampleRecord> samples = load_samples(config.paths.samples);
    PromptTemplate prompt = PromptTemplate::builtin(config.prompt_id);

    std::optional<ResponseCache> cache;
    if (config.call_mode != CallMode::Live) {
        if (config.paths.cache.empty()) {
            throw ConfigError("predict: cache path required in " +
                              std::string(to_string(config.call_mode)) + " mode");
        }
        cache.emplace(config.paths.cache);
    }

    std::vector<RawResponse> responses =
        batch_classify(config.judges, samples, prompt, cache ? &*cache : nullptr,
                       config.call_mode, config.gateway_options());

    std::vector<PredictionRow> rows;
    rows.reserve(responses.size());
    std::size_t failures = 0;
    for (const RawResponse& response : responses) {
        PredictionRow row;
        row.sample_id = response.sample_id;
        row.model_id = response.model_id;
        row.prompt_id = response.prompt_id;
        row.raw_text = response.response_text;
        row.ok = response.ok;
        row.error = response.error;
        row.from_cache = response.retrieved_from_cache;
        row.latency_ms = response.latency_ms;
        if (response.ok) {
            NormalizedPrediction normalized =
                normalize(response.response_text, taxonomy.synonyms);
            row.label = normalized.label;
            row.invalid_reason = normalized.reason;
        } else {
            ++failures;
            row.invalid_reason = InvalidReason::Empty;
        }
        rows.push_back(std::move(row));
    }
    if (!responses.empty() && failures == responses.size()) {
        throw ProviderError("predict: all " + std::to_string(failures) + " calls failed; first error: " +
                            rows.front().error);
    }
    if (failures > 0) {
        std::cerr << "warning: " << failures << " of " << responses.size()
                  << " calls failed; rows carry the error\n";
    }

    save_predictions(config.predictions_path(), rows);
    write_run_manifest(config, taxonomy);
}

void cmd_calibrate(const RunConfig& config) {
    Taxonomy taxonomy = config.taxonomy();
    std::vector<PredictionRow> rows = load_predictions(config.predictions_path());
    std::vector<GoldRecord> gold = load_gold(config.paths.gold, taxonomy.synonyms);
    std::vector<GoldRecord> subset = calibration_split(gold, config.split_fraction);

    if (subset.size() == gold.size()) {
        std::cerr << "warning: calibrating on the full gold set; evaluating on the same "
                     "samples leaks calibration data (use --split to hold out a part)\n";
    }

    WeightsFile weights = calibrate_from_rows(config, rows, subset);
    weights.save(config.weights_path());
    write_run_manifest(config, taxonomy);

    std::cout << "calibrated " << weights.metric_values.size() << " models on "
              << subset.size() << " gold samples (" << to_string(weights.metric) << "):\n";
    for (const auto& [model_id, value] : weights.metric_values) {
        std::cout << "  " << model_id << ": " << to_string(weights.metric) << "=" << value
                  << " weight=" << weights.weights.at(model_id) << '\n';
    }
}

void cmd_ensemble(const RunConfig& config) {
    Taxonomy taxonomy = config.taxonomy();
    std::vector<PredictionRow> rows = load_predictions(config.predictions_path());

    WeightVector weights;
    if (config.ensemble_mode != EnsembleMode::Uniform) {
        if (!std::filesystem::exists(config.weights_path())) {
            throw ConfigError("ensemble mode '" +
                              std::string(to_string(config.ensemble_mode)) +
                              "' requires a weights file (run calibrate first): " +
                              config.weights_path().string());
        }
        weights = WeightsFile::load(config.weights_path()).weights;
    }

    std::vector<DecisionRow> decisions = ensemble_decisions(config, rows, weights, taxonomy);
    save_decisions(config.decisions_path(), decisions);
    write_run_manifest(config, taxonomy);

    std::size_t unresolved = 0;
    for (const DecisionRow& row : decisions) {
        if (!row.decision.resolved()) {
            ++unresolved;
        }
    }
    std::cout << "decided " << decisions.size() << " samples";
    if (unresolved > 0) {
        std::cout << " (" << unresolved << " unresolved)";
    }
    std::cout << '\n';
}

void cmd_evaluate(const RunConfig& config) {
    Taxonomy taxonomy = config.taxonomy();
    std::vector<GoldRecord> gold = load_gold(config.paths.gold, taxonomy.synonyms);
    std::vector<PredictionRow> rows = load_predictions(config.predictions_path());

    std::vector<GoldRecord> eval_gold = gold;
    if (config.held_out_only) {
        if (!std::filesystem::exists(config.weights_path())) {
            throw ConfigError("--held-out-only requires the weights file recording the "
                              "calibration split");
        }
        WeightsFile weights = WeightsFile::load(config.weights_path());
        std::set<std::string> calibration_ids(weights.calibration_sample_ids.begin(),
                                              weights.calibration_sample_ids.end());
        eval_gold.clear();
        for (const GoldRecord& record : gold) {
            if (!calibration_ids.count(record.sample_id)) {
                eval_gold.push_back(record);
            }
        }
        if (eval_gold.empty()) {
            throw DataError("held-out evaluation set is empty; calibration used every "
                            "gold sample");
        }
    } else if (std::filesystem::exists(config.weights_path())) {
        WeightsFile weights = WeightsFile::load(config.weights_path());
        if (!weights.calibration_sample_ids.empty()) {
            std::cerr << "warning: evaluation set overlaps the calibration split ("
                      << weights.calibration_sample_ids.size()
                      << " calibration samples); pass --held-out-only for a clean split\n";
        }
    }

    std::vector<std::pair<std::string, MetricsReport>> units;
    for (const auto& [model_id, preds] : valid_predictions_by_model(rows)) {
        units.emplace_back(model_id, unit_metrics(outcome_map(preds), eval_gold, config));
    }

    if (std::filesystem::exists(config.decisions_path())) {
        std::vector<DecisionRow> decisions = load_decisions(config.decisions_path());
        check_ids_match(decisions, gold);
        units.emplace_back("ensemble",
                           unit_metrics(decision_outcomes(decisions), eval_gold, config));
    } else {
        std::cerr << "warning: no decisions file at " << config.decisions_path().string()
                  << "; reporting individual judges only\n";
    }

    nlohmann::json unit_docs = nlohmann::json::object();
    for (const auto& [name, report] : units) {
        unit_docs[name] = metrics_to_json(report);
    }
    atomic_write_file(config.paths.out_dir / "metrics.json",
                      nlohmann::json{{"units", unit_docs}}.dump(2) + "\n");

    std::string table = render_metrics_table(units);
    atomic_write_file(config.paths.out_dir / "metrics.txt", table);
    write_run_manifest(config, taxonomy);
    std::cout << table;
}

void cmd_sweep(const RunConfig& config, const std::vector<std::string>& prompt_ids) {
    if (prompt_ids.empty()) {
        throw ConfigError("sweep: no prompt ids given");
    }
    if (config.judges.empty()) {
        throw ConfigError("sweep: no judges configured");
    }
    Taxonomy taxonomy = config.taxonomy();
    std::vector<SampleRecord> samples = load_samples(config.paths.samples);
    std::vector<GoldRecord> gold = load_gold(config.paths.gold, taxonomy.synonyms);

    if (config.paths.cache.empty()) {
        throw ConfigError("sweep: cache path required");
    }
    ResponseCache cache(config.paths.cache);

    // Replay requires full coverage up front; enumerate every missing key.
    if (config.call_mode == CallMode::Replay) {
        std::string missing;
        std::size_t n_missing = 0;
        for (const std::string& prompt_id : prompt_ids) {
            for (const JudgeConfig& judge : config.judges) {
                for (const SampleRecord& sample : samples) {
                    CacheKey key{sample.sample_id, judge.model_id, prompt_id};
                    if (!cache.contains(key)) {
                        ++n_missing;
                        if (!missing.empty()) missing += "\n";
                        missing += "  " + key.describe();
                    }
                }
            }
        }
        if (n_missing > 0) {
            throw CacheMissError("sweep: " + std::to_string(n_missing) +
                                 " keys missing from replay cache:\n" + missing);
        }
    }

    std::vector<std::pair<std::string, std::vector<std::pair<std::string, MetricsReport>>>>
        sweep_rows;
    for (const std::string& prompt_id : prompt_ids) {
        PromptTemplate prompt = PromptTemplate::builtin(prompt_id);
        std::vector<RawResponse> responses =
            batch_classify(config.judges, samples, prompt, &cache, config.call_mode,
                           config.gateway_options());

        std::vector<PredictionRow> rows;
        for (const RawResponse& response : responses) {
            PredictionRow row;
            row.sample_id = response.sample_id;
            row.model_id = response.model_id;
            row.prompt_id = response.prompt_id;
            row.raw_text = response.response_text;
            row.ok = response.ok;
            if (response.ok) {
                NormalizedPrediction normalized =
                    normalize(response.response_text, taxonomy.synonyms);
                row.label = normalized.label;
                row.invalid_reason = normalized.reason;
            } else {
                row.invalid_reason = InvalidReason::Empty;
                row.error = response.error;
            }
            rows.push_back(std::move(row));
        }

        std::vector<std::pair<std::string, MetricsReport>> unit_rows;
        for (const auto& [model_id, preds] : valid_predictions_by_model(rows)) {
            unit_rows.emplace_back(model_id, unit_metrics(outcome_map(preds), gold, config));
        }

        // Per-prompt gold calibration feeds the ensemble's FinalLabel row.
        WeightsFile weights = calibrate_from_rows(config, rows, gold);
        std::vector<DecisionRow> decisions =
            ensemble_decisions(config, rows, weights.weights, taxonomy);
        unit_rows.emplace_back("FinalLabel",
                               unit_metrics(decision_outcomes(decisions), gold, config));

        sweep_rows.emplace_back(prompt_id, std::move(unit_rows));
    }

    nlohmann::json doc = nlohmann::json::object();
    std::string table;
    for (const auto& [prompt_id, unit_rows] : sweep_rows) {
        nlohmann::json prompt_doc = nlohmann::json::object();
        for (const auto& [unit, report] : unit_rows) {
            prompt_doc[unit] = metrics_to_json(report);
        }
        doc[prompt_id] = prompt_doc;
        table += "Prompt " + prompt_id + "\n";
        table += render_metrics_table(unit_rows);
        table += "\n";
    }
    atomic_write_file(config.paths.out_dir / "sweep.json",
                      nlohmann::json{{"prompts", doc}}.dump(2) + "\n");
    atomic_write_file(config.paths.out_dir / "sweep.txt", table);
    write_run_manifest(config, taxonomy);
    std::cout << table;
}

void cmd_report(const RunConfig& config, const std::filesystem::path& report_path,
                bool per_class) {
    (void)config;
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(report_path));
    } catch (const nlohmann::json::exception& e) {
        throw DataError("invalid report file " + report_path.string() + ": " + e.what());
    }

    auto render_units = [per_class](const nlohmann::json& units) {
        std::vector<std::pair<std::string, MetricsReport>> rows;
        for (const auto& [unit, report] : units.items()) {
            rows.emplace_back(unit, metrics_from_json(report));
        }
        std::cout << render_metrics_table(rows);
        if (per_class) {
            for (const auto& [unit, report] : rows) {
                std::cout << '\n' << unit << '\n' << render_class_breakdown(report);
            }
        }
    };

    if (doc.contains("units")) {
        render_units(doc.at("units"));
    } else if (doc.contains("prompts")) {
        for (const auto& [prompt_id, units] : doc.at("prompts").items()) {
            std::cout << "Prompt " << prompt_id << '\n';
            render_units(units);
            std::cout << '\n';
        }
    } else {
        throw DataError("report file " + report_path.string() +
                        " is neither a metrics nor a sweep report");
    }
}

void run_pipeline(const RunConfig& config) {
    cmd_predict(config);
    cmd_calibrate(config);
    cmd_ensemble(config);
    cmd_evaluate(config);
}

}  // namespace malfam
