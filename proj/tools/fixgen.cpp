// Regenerates the offline fixture assets: synthetic sample corpus, gold CSV
// with the reference family distribution, judge profile dump, and a fully
// populated replay cache. Output is byte-deterministic for a fixed seed.

#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "malfam/corpus.hpp"
#include "malfam/fixtures.hpp"
#include "malfam/util.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Generate the deterministic offline fixture assets"};
    std::string out_dir = "fixtures";
    std::string prompt_id = "P0";
    std::uint64_t seed = malfam::fixtures::kFixtureSeed;
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--prompt", prompt_id, "prompt id to key the cache under");
    app.add_option("--seed", seed, "generation seed");
    CLI11_PARSE(app, argc, argv);

    try {
        const std::filesystem::path root(out_dir);
        std::filesystem::create_directories(root);

        auto gold = malfam::fixtures::table_distribution_gold();
        auto samples = malfam::fixtures::generate_fixture_samples(gold, seed);
        const auto& profiles = malfam::fixtures::default_profiles();

        malfam::save_gold(root / "gold.csv", gold);
        malfam::save_samples(root / "samples.jsonl", samples);

        nlohmann::json judges = nlohmann::json::array();
        for (const auto& profile : profiles) {
            nlohmann::json emission = nlohmann::json::array();
            for (const auto& row : profile.emission) {
                emission.push_back(row);
            }
            judges.push_back(nlohmann::json{
                {"model_id", profile.model_id},
                {"seed", profile.seed},
                {"quirks",
                 {{"fence_rate", profile.quirks.fence_rate},
                  {"synonym_rate", profile.quirks.synonym_rate},
                  {"explanation_rate", profile.quirks.explanation_rate},
                  {"empty_rate", profile.quirks.empty_rate}}},
                {"emission", emission},
            });
        }
        malfam::atomic_write_file(root / "judges.json", judges.dump(2) + "\n");

        malfam::ResponseCache cache(root / "cache");
        malfam::fixtures::generate_fixture_cache(profiles, samples, gold, prompt_id, seed,
                                                 cache);

        std::cout << "wrote " << samples.size() << " samples, " << gold.size()
                  << " gold rows, " << profiles.size() << " judge profiles, "
                  << cache.keys().size() << " cache entries under " << root.string()
                  << " (snapshot " << cache.snapshot_id() << ")\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "fixgen error: " << e.what() << '\n';
        return 1;
    }
}
