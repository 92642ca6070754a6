#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "malfam/cache.hpp"
#include "malfam/corpus.hpp"
#include "malfam/ensemble.hpp"

namespace malfam {
namespace fixtures {

/// Response-style quirks layered on top of the emitted label. Rates are
/// probabilities in [0, 1].
struct JudgeQuirks {
    double fence_rate = 0.0;        // wrap in a markdown code fence
    double synonym_rate = 0.0;      // emit an alias instead of the canonical string
    double explanation_rate = 0.0;  // wrap in an explanatory sentence
    double empty_rate = 0.0;        // emit nothing at all
};

/// A deterministic simulated judge. emission[g][e] is the probability of
/// emitting family e when the gold label is g; rows sum to 1.
struct SyntheticJudgeProfile {
    std::string model_id;
    std::array<std::array<double, kFamilyCount>, kFamilyCount> emission{};
    JudgeQuirks quirks;
    std::uint64_t seed = 0;

    /// Correct with probability `accuracy`; the remaining mass splits between
    /// the other families of the same behavior group (cluster_share) and all
    /// remaining families, uniformly within each part.
    static SyntheticJudgeProfile with_cluster_confusion(std::string model_id, double accuracy,
                                                        double cluster_share,
                                                        JudgeQuirks quirks,
                                                        std::uint64_t seed);
};

/// The four judge profiles the shipped fixture cache was generated from.
/// Their measured fixture accuracies span roughly 0.4 to 0.75.
const std::vector<SyntheticJudgeProfile>& default_profiles();

inline constexpr std::uint64_t kFixtureSeed = 20240731;

/// 200 gold records (ids s0001..s0200) whose family counts match the
/// reference gold-set distribution, deterministically interleaved.
std::vector<GoldRecord> table_distribution_gold();

/// Templated stub samples for the given gold records; contents are
/// deterministic under the seed.
std::vector<SampleRecord> generate_fixture_samples(const std::vector<GoldRecord>& gold,
                                                   std::uint64_t seed);

/// The exact response text a profile produces for one cache key. Byte-stable
/// for identical (profile, seed, key) regardless of generation order.
std::string synthesize_response(const SyntheticJudgeProfile& profile, FamilyLabel gold_label,
                                const std::string& sample_id, const std::string& prompt_id,
                                std::uint64_t seed);

/// Fills `cache` with one entry per (sample, profile, prompt_id) key.
void generate_fixture_cache(const std::vector<SyntheticJudgeProfile>& profiles,
                            const std::vector<SampleRecord>& samples,
                            const std::vector<GoldRecord>& gold, const std::string& prompt_id,
                            std::uint64_t seed, ResponseCache& cache);

/// Independent, deliberately literal re-statement of the three-stage
/// decision procedure, used only to cross-check decide_hierarchical. Shares
/// no code with the ensemble module beyond the taxonomy types.
std::optional<FamilyLabel> oracle_decide(const std::vector<ModelPrediction>& preds,
                                         const WeightVector& weights,
                                         const SpecificityTable& specificity);

}  // namespace fixtures
}  // namespace malfam
