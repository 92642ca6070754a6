#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>

#include "malfam/commands.hpp"
#include "malfam/errors.hpp"
#include "malfam/fixtures.hpp"
#include "malfam/util.hpp"
#include "support/counting_provider.hpp"

using namespace malfam;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    TempDir() {
        path = fs::temp_directory_path() /
               ("malfam_commands_" + std::to_string(fnv1a64(std::to_string(
                                         reinterpret_cast<std::uintptr_t>(this)))));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path path;
};

RunConfig fixture_config(const fs::path& out_dir,
                         std::shared_ptr<testing::CountingProvider> provider) {
    RunConfig config;
    for (const auto& profile : fixtures::default_profiles()) {
        JudgeConfig judge;
        judge.model_id = profile.model_id;
        judge.endpoint = "fixture://" + profile.model_id;
        config.judges.push_back(std::move(judge));
    }
    config.prompt_id = "P0";
    config.call_mode = CallMode::Replay;
    config.backoff_base_ms = 0;
    config.paths.samples = fs::path(MALFAM_FIXTURE_DIR) / "samples.jsonl";
    config.paths.gold = fs::path(MALFAM_FIXTURE_DIR) / "gold.csv";
    config.paths.cache = fs::path(MALFAM_FIXTURE_DIR) / "cache";
    config.paths.out_dir = out_dir;
    config.provider_factory = [provider](const JudgeConfig&) { return provider; };
    return config;
}

std::map<fs::path, std::string> slurp_outputs(const fs::path& dir) {
    std::map<fs::path, std::string> contents;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file()) {
            contents[fs::relative(entry.path(), dir)] = read_file(entry.path());
        }
    }
    return contents;
}

PredictionRow quick_row(const std::string& sample, const std::string& model,
                        FamilyLabel family) {
    PredictionRow row;
    row.sample_id = sample;
    row.model_id = model;
    row.prompt_id = "P0";
    row.raw_text = std::string(display_name(family));
    row.label = family;
    return row;
}

}  // namespace

TEST_CASE("full pipeline over the shipped fixtures: 800 rows, zero network calls") {
    TempDir out;
    auto provider = std::make_shared<testing::CountingProvider>(testing::echo_family);
    RunConfig config = fixture_config(out.path, provider);

    run_pipeline(config);

    CHECK(provider->calls() == 0);  // replay never touches the network
    std::vector<PredictionRow> rows = load_predictions(config.predictions_path());
    CHECK(rows.size() == 800);
    std::vector<DecisionRow> decisions = load_decisions(config.decisions_path());
    CHECK(decisions.size() == 200);
    CHECK(fs::exists(out.path / "metrics.json"));
    CHECK(fs::exists(out.path / "metrics.txt"));
    CHECK(fs::exists(out.path / "weights.json"));
    CHECK(fs::exists(out.path / "run_manifest.json"));

    WeightsFile weights = WeightsFile::load(config.weights_path());
    CHECK(weights.metric_values.size() == 4);
    CHECK(weights.weights.is_normalized(1e-9));

    // per-judge metrics + ensemble row
    nlohmann::json metrics = nlohmann::json::parse(read_file(out.path / "metrics.json"));
    CHECK(metrics.at("units").size() == 5);
    CHECK(metrics.at("units").contains("ensemble"));
}

TEST_CASE("two replay runs produce byte-identical outputs") {
    TempDir out_a;
    TempDir out_b;
    auto provider = std::make_shared<testing::CountingProvider>(testing::echo_family);

    RunConfig first = fixture_config(out_a.path, provider);
    run_pipeline(first);
    auto bytes_a = slurp_outputs(out_a.path);

    RunConfig second = fixture_config(out_b.path, provider);
    run_pipeline(second);
    auto bytes_b = slurp_outputs(out_b.path);

    REQUIRE(bytes_a.size() == bytes_b.size());
    for (const auto& [name, content] : bytes_a) {
        CAPTURE(name.string());
        CHECK(content == bytes_b.at(name));
    }
    CHECK(provider->calls() == 0);
}

TEST_CASE("golden decisions: the worked examples reproduce byte-for-byte") {
    TempDir out;
    RunConfig config;
    config.paths.out_dir = out.path;
    config.ensemble_mode = EnsembleMode::WeightedHierarchical;

    // equal-weight judges m0..m3
    WeightsFile weights;
    weights.metric = CalibrationMetric::Accuracy;
    weights.metric_values = {{"m0", 0.25}, {"m1", 0.25}, {"m2", 0.25}, {"m3", 0.25}};
    weights.weights = WeightVector(
        std::map<std::string, double>{{"m0", 0.25}, {"m1", 0.25}, {"m2", 0.25}, {"m3", 0.25}});
    weights.save(config.weights_path());

    std::vector<PredictionRow> rows = {
        // g1: three-way trojan-like tie resolved by specificity to Spyware
        quick_row("g1", "m0", FamilyLabel::Trojan),
        quick_row("g1", "m1", FamilyLabel::BackdoorRat),
        quick_row("g1", "m2", FamilyLabel::SpywareInfostealer),
        quick_row("g1", "m3", FamilyLabel::Downloader),
        // g2: global tie Worm/Ransomware falls to Ransomware
        quick_row("g2", "m0", FamilyLabel::Worm),
        quick_row("g2", "m1", FamilyLabel::Worm),
        quick_row("g2", "m2", FamilyLabel::Ransomware),
        quick_row("g2", "m3", FamilyLabel::Ransomware),
        // g3: strict majority
        quick_row("g3", "m0", FamilyLabel::Trojan),
        quick_row("g3", "m1", FamilyLabel::Trojan),
        quick_row("g3", "m2", FamilyLabel::Trojan),
        quick_row("g3", "m3", FamilyLabel::Worm),
    };
    save_predictions(config.predictions_path(), rows);

    cmd_ensemble(config);

    // expected bytes straight from the decision functions
    auto expect_line = [&](const std::string& sample,
                           const std::vector<ModelPrediction>& preds) {
        DecisionRow row;
        row.sample_id = sample;
        row.decision = decide_hierarchical(preds, weights.weights,
                                           SpecificityTable::defaults());
        return row.to_json().dump();
    };
    auto pred = [](const std::string& m, FamilyLabel f) {
        return ModelPrediction{m, NormalizedPrediction::valid_of(
                                      f, std::string(display_name(f)))};
    };
    std::string expected =
        expect_line("g1", {pred("m0", FamilyLabel::Trojan), pred("m1", FamilyLabel::BackdoorRat),
                           pred("m2", FamilyLabel::SpywareInfostealer),
                           pred("m3", FamilyLabel::Downloader)}) +
        "\n" +
        expect_line("g2", {pred("m0", FamilyLabel::Worm), pred("m1", FamilyLabel::Worm),
                           pred("m2", FamilyLabel::Ransomware),
                           pred("m3", FamilyLabel::Ransomware)}) +
        "\n" +
        expect_line("g3", {pred("m0", FamilyLabel::Trojan), pred("m1", FamilyLabel::Trojan),
                           pred("m2", FamilyLabel::Trojan), pred("m3", FamilyLabel::Worm)}) +
        "\n";
    CHECK(read_file(config.decisions_path()) == expected);

    // and the labels are the expected ones
    std::vector<DecisionRow> decisions = load_decisions(config.decisions_path());
    REQUIRE(decisions.size() == 3);
    CHECK(decisions[0].decision.label == FamilyLabel::SpywareInfostealer);
    CHECK(decisions[0].decision.stage == DecisionStage::SpecificityTiebreak);
    CHECK(decisions[1].decision.label == FamilyLabel::Ransomware);
    CHECK(decisions[2].decision.label == FamilyLabel::Trojan);
    CHECK(decisions[2].decision.stage == DecisionStage::FamilyMajority);
}

TEST_CASE("all-invalid sample becomes an UNRESOLVED row without failing the run") {
    TempDir out;
    RunConfig config;
    config.paths.out_dir = out.path;
    config.ensemble_mode = EnsembleMode::Uniform;

    PredictionRow bad;
    bad.sample_id = "s1";
    bad.model_id = "m0";
    bad.prompt_id = "P0";
    bad.raw_text = "";
    bad.invalid_reason = InvalidReason::Empty;
    save_predictions(config.predictions_path(), {bad});

    cmd_ensemble(config);
    std::vector<DecisionRow> decisions = load_decisions(config.decisions_path());
    REQUIRE(decisions.size() == 1);
    CHECK(!decisions[0].decision.resolved());
    CHECK(decisions[0].decision.stage == DecisionStage::Unresolved);
    CHECK(decisions[0].to_json().at("label") == "UNRESOLVED");
}

TEST_CASE("weighted modes refuse to run without a weights file") {
    TempDir out;
    RunConfig config;
    config.paths.out_dir = out.path;
    config.ensemble_mode = EnsembleMode::Weighted;
    save_predictions(config.predictions_path(), {quick_row("s1", "m0", FamilyLabel::Worm)});
    CHECK_THROWS_AS(cmd_ensemble(config), ConfigError);

    config.ensemble_mode = EnsembleMode::Uniform;
    CHECK_NOTHROW(cmd_ensemble(config));
}

TEST_CASE("empty samples file yields an empty predictions file") {
    TempDir out;
    auto provider = std::make_shared<testing::CountingProvider>(testing::echo_family);
    RunConfig config = fixture_config(out.path, provider);
    fs::path empty_samples = out.path / "empty.jsonl";
    atomic_write_file(empty_samples, "");
    config.paths.samples = empty_samples;

    cmd_predict(config);
    CHECK(load_predictions(config.predictions_path()).empty());
}

TEST_CASE("calibration split holds out gold samples and evaluate honors it") {
    TempDir out;
    auto provider = std::make_shared<testing::CountingProvider>(testing::echo_family);
    RunConfig config = fixture_config(out.path, provider);
    config.split_fraction = 0.5;

    cmd_predict(config);
    cmd_calibrate(config);

    WeightsFile weights = WeightsFile::load(config.weights_path());
    CHECK(weights.calibration_sample_ids.size() == 100);

    cmd_ensemble(config);
    config.held_out_only = true;
    cmd_evaluate(config);
    nlohmann::json metrics = nlohmann::json::parse(read_file(out.path / "metrics.json"));
    // held-out half only
    CHECK(metrics.at("units").at("ensemble").at("n_samples").get<int>() == 100);
}

TEST_CASE("evaluate rejects decision files whose ids do not match gold") {
    TempDir out;
    auto provider = std::make_shared<testing::CountingProvider>(testing::echo_family);
    RunConfig config = fixture_config(out.path, provider);
    cmd_predict(config);
    cmd_calibrate(config);
    cmd_ensemble(config);

    // drop one decision and add a stray one
    std::vector<DecisionRow> decisions = load_decisions(config.decisions_path());
    decisions.front().sample_id = "not-in-gold";
    save_decisions(config.decisions_path(), decisions);
    try {
        cmd_evaluate(config);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        std::string what = e.what();
        CHECK(what.find("not-in-gold") != std::string::npos);
        CHECK(what.find("s0001") != std::string::npos);  // the dropped gold id
    }
}

TEST_CASE("sweep produces per-prompt rows and enforces full replay coverage") {
    TempDir dir;
    fs::path out = dir.path / "out";

    // tiny corpus: 3 samples, 2 judges, prompts P1/P2
    std::vector<GoldRecord> gold = {{"t1", FamilyLabel::Worm},
                                    {"t2", FamilyLabel::Ransomware},
                                    {"t3", FamilyLabel::Downloader}};
    std::vector<SampleRecord> samples;
    for (const GoldRecord& record : gold) {
        samples.push_back({record.sample_id, "int main();", {"CreateFileA"}});
    }
    save_gold(dir.path / "gold.csv", gold);
    save_samples(dir.path / "samples.jsonl", samples);

    // judge A: correct under P1, always Trojan under P2; judge B: always correct
    ResponseCache cache(dir.path / "cache");
    for (const GoldRecord& record : gold) {
        CacheEntry entry;
        entry.status = 200;
        entry.response_text = std::string(display_name(record.label));
        cache.store({record.sample_id, "judge-a", "P1"}, entry);
        cache.store({record.sample_id, "judge-b", "P1"}, entry);
        cache.store({record.sample_id, "judge-b", "P2"}, entry);
        entry.response_text = "Trojan";
        cache.store({record.sample_id, "judge-a", "P2"}, entry);
    }

    RunConfig config;
    JudgeConfig a, b;
    a.model_id = "judge-a";
    b.model_id = "judge-b";
    a.endpoint = b.endpoint = "fixture://sweep";
    config.judges = {a, b};
    config.call_mode = CallMode::Replay;
    config.paths.samples = dir.path / "samples.jsonl";
    config.paths.gold = dir.path / "gold.csv";
    config.paths.cache = dir.path / "cache";
    config.paths.out_dir = out;
    auto provider = std::make_shared<testing::CountingProvider>(testing::echo_family);
    config.provider_factory = [provider](const JudgeConfig&) { return provider; };

    cmd_sweep(config, {"P1", "P2"});
    CHECK(provider->calls() == 0);

    nlohmann::json sweep = nlohmann::json::parse(read_file(out / "sweep.json"));
    REQUIRE(sweep.at("prompts").size() == 2);
    // 2 prompts x (2 judges + FinalLabel) = 6 metric rows
    CHECK(sweep.at("prompts").at("P1").size() == 3);
    CHECK(sweep.at("prompts").at("P2").size() == 3);
    CHECK(sweep.at("prompts").at("P1").at("judge-a").at("accuracy").get<double>() == 1.0);
    CHECK(sweep.at("prompts").at("P2").at("judge-a").at("accuracy").get<double>() == 0.0);
    CHECK(sweep.at("prompts").at("P2").at("judge-b").at("accuracy").get<double>() == 1.0);

    // partial coverage: P3 was never recorded
    try {
        cmd_sweep(config, {"P1", "P3"});
        FAIL("expected CacheMissError");
    } catch (const CacheMissError& e) {
        std::string what = e.what();
        CHECK(what.find("P3") != std::string::npos);
        CHECK(what.find("t1") != std::string::npos);
        CHECK(what.find("6 keys missing") != std::string::npos);
    }
}

TEST_CASE("cli binary maps error classes to exit codes") {
    const std::string cli = MALFAM_CLI_PATH;
    auto run = [&](const std::string& args) {
        std::string command = cli + " " + args + " >/dev/null 2>&1";
        int status = std::system(command.c_str());
        return WEXITSTATUS(status);
    };
    CHECK(run("--help") == 0);
    CHECK(run("bogus-subcommand") == 1);
    CHECK(run("predict") == 1);  // no judges configured
    CHECK(run("evaluate --gold /nonexistent/gold.csv --out /tmp/malfam_cli_test") != 0);
    CHECK(run("report /nonexistent/metrics.json") == 2);
}
