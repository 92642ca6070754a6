#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "malfam/commands.hpp"
#include "malfam/corpus.hpp"
#include "malfam/errors.hpp"
#include "malfam/run_config.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitProvider = 3;

struct CliState {
    std::string config_file;
    malfam::RunConfig config;

    // Flag staging; only applied when the user actually passed the flag.
    std::string samples, gold, cache, weights, predictions, decisions, out_dir, taxonomy;
    std::string prompt_id, mode, metric, denominator, call_mode;
    double split_fraction = 1.0;
    bool include_zero_support = false;
    bool no_merge_equivalent = false;
    bool held_out_only = false;
    int per_provider = 0, global_limit = 0;
};

void add_common_flags(CLI::App* cmd, CliState& state) {
    cmd->add_option("--config", state.config_file, "JSON run-config file");
    cmd->add_option("--samples", state.samples, "samples JSONL file");
    cmd->add_option("--gold", state.gold, "gold CSV file (sample_id,label)");
    cmd->add_option("--cache", state.cache, "response cache directory");
    cmd->add_option("--weights", state.weights, "weights JSON file");
    cmd->add_option("--predictions", state.predictions, "predictions JSONL file");
    cmd->add_option("--decisions", state.decisions, "decisions JSONL file");
    cmd->add_option("--out", state.out_dir, "output directory");
    cmd->add_option("--taxonomy", state.taxonomy, "taxonomy override JSON file");
    cmd->add_option("--prompt", state.prompt_id, "prompt id (P0..P5)");
    cmd->add_option("--mode", state.mode,
                    "ensemble mode: uniform | weighted | weighted_hierarchical");
    cmd->add_option("--metric", state.metric, "calibration metric: accuracy | macro_f1");
    cmd->add_option("--denominator", state.denominator,
                    "majority denominator: valid_voters | all_models");
    cmd->add_option("--call-mode", state.call_mode, "record | replay | live");
    cmd->add_option("--split", state.split_fraction,
                    "fraction of gold used for calibration (default 1.0)");
    cmd->add_flag("--include-zero-support", state.include_zero_support,
                  "average macros over zero-support classes too");
    cmd->add_flag("--no-merge-equivalent", state.no_merge_equivalent,
                  "score Trojan and Backdoor/RAT as distinct classes");
    cmd->add_flag("--held-out-only", state.held_out_only,
                  "evaluate only gold samples outside the calibration split");
    cmd->add_option("--per-provider-limit", state.per_provider,
                    "max in-flight requests per endpoint");
    cmd->add_option("--global-limit", state.global_limit, "max in-flight requests overall");
}

void finalize_config(const CLI::App* cmd, CliState& state) {
    if (!state.config_file.empty()) {
        state.config = malfam::RunConfig::load(state.config_file);
    }
    malfam::RunConfig& c = state.config;
    auto passed = [cmd](const std::string& name) { return cmd->count(name) > 0; };

    if (passed("--samples")) c.paths.samples = state.samples;
    if (passed("--gold")) c.paths.gold = state.gold;
    if (passed("--cache")) c.paths.cache = state.cache;
    if (passed("--weights")) c.paths.weights = state.weights;
    if (passed("--predictions")) c.paths.predictions = state.predictions;
    if (passed("--decisions")) c.paths.decisions = state.decisions;
    if (passed("--out")) c.paths.out_dir = state.out_dir;
    if (passed("--taxonomy")) c.paths.taxonomy = state.taxonomy;
    if (passed("--prompt")) c.prompt_id = state.prompt_id;
    if (passed("--mode")) {
        auto mode = malfam::ensemble_mode_from_string(state.mode);
        if (!mode) throw malfam::ConfigError("invalid --mode '" + state.mode + "'");
        c.ensemble_mode = *mode;
    }
    if (passed("--metric")) {
        auto metric = malfam::calibration_metric_from_string(state.metric);
        if (!metric) throw malfam::ConfigError("invalid --metric '" + state.metric + "'");
        c.calibration_metric = *metric;
    }
    if (passed("--denominator")) {
        auto denominator = malfam::denominator_from_string(state.denominator);
        if (!denominator) {
            throw malfam::ConfigError("invalid --denominator '" + state.denominator + "'");
        }
        c.denominator = *denominator;
    }
    if (passed("--call-mode")) {
        auto mode = malfam::call_mode_from_string(state.call_mode);
        if (!mode) throw malfam::ConfigError("invalid --call-mode '" + state.call_mode + "'");
        c.call_mode = *mode;
    }
    if (passed("--split")) {
        if (state.split_fraction <= 0.0 || state.split_fraction > 1.0) {
            throw malfam::ConfigError("--split must lie in (0, 1]");
        }
        c.split_fraction = state.split_fraction;
    }
    if (state.include_zero_support) c.include_zero_support = true;
    if (state.no_merge_equivalent) c.merge_equivalent = false;
    if (state.held_out_only) c.held_out_only = true;
    if (passed("--per-provider-limit")) c.per_provider_limit = state.per_provider;
    if (passed("--global-limit")) c.global_limit = state.global_limit;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Malware family attribution via a weighted hierarchical ensemble of "
                 "LLM judges"};
    app.require_subcommand(1);

    CliState state;
    std::vector<std::string> sweep_prompts;
    std::string report_file;
    bool report_per_class = false;
    bool show_distribution = false;

    CLI::App* predict = app.add_subcommand(
        "predict", "query every judge for every sample and normalize the outputs");
    add_common_flags(predict, state);

    CLI::App* calibrate = app.add_subcommand(
        "calibrate", "derive per-model weights from gold-set performance");
    add_common_flags(calibrate, state);

    CLI::App* ensemble = app.add_subcommand(
        "ensemble", "aggregate normalized predictions into final labels");
    add_common_flags(ensemble, state);

    CLI::App* evaluate = app.add_subcommand(
        "evaluate", "score judges and ensemble against the gold set");
    add_common_flags(evaluate, state);
    evaluate->add_flag("--distribution", show_distribution,
                       "also print the gold family distribution");

    CLI::App* sweep = app.add_subcommand(
        "sweep", "run the prompt-sensitivity sweep over a set of prompt ids");
    add_common_flags(sweep, state);
    sweep->add_option("--prompts", sweep_prompts, "prompt ids to sweep (e.g. P1 P2 P3)")
        ->expected(-1);

    CLI::App* report = app.add_subcommand(
        "report", "render a metrics or sweep JSON report as aligned tables");
    add_common_flags(report, state);
    report->add_option("file", report_file, "metrics.json or sweep.json")->required();
    report->add_flag("--per-class", report_per_class, "include per-class breakdowns");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        CLI::App* cmd = app.get_subcommands().front();
        finalize_config(cmd, state);

        if (cmd == predict) {
            malfam::cmd_predict(state.config);
        } else if (cmd == calibrate) {
            malfam::cmd_calibrate(state.config);
        } else if (cmd == ensemble) {
            malfam::cmd_ensemble(state.config);
        } else if (cmd == evaluate) {
            if (show_distribution) {
                auto taxonomy = state.config.taxonomy();
                auto gold = malfam::load_gold(state.config.paths.gold, taxonomy.synonyms);
                std::cout << malfam::render_gold_distribution(malfam::gold_distribution(gold));
            }
            malfam::cmd_evaluate(state.config);
        } else if (cmd == sweep) {
            if (sweep_prompts.empty()) {
                sweep_prompts = {"P1", "P2", "P3", "P4", "P5"};
            }
            malfam::cmd_sweep(state.config, sweep_prompts);
        } else if (cmd == report) {
            malfam::cmd_report(state.config, report_file, report_per_class);
        }
        return kExitOk;
    } catch (const malfam::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const malfam::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const malfam::ProviderError& e) {
        std::cerr << "provider error: " << e.what() << '\n';
        return kExitProvider;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
}
