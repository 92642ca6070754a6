// Deliberately naive transcription of the three-stage decision procedure,
// kept free of any code shared with src/ensemble.cpp so the two can
// cross-check each other. Do not "clean up" by delegating to the ensemble
// module.

#include <map>
#include <vector>

#include "malfam/fixtures.hpp"

namespace malfam {
namespace fixtures {

namespace {

// Behavior groups restated literally, independent of behavior_group_of().
const std::vector<std::vector<FamilyLabel>>& oracle_groups() {
    static const std::vector<std::vector<FamilyLabel>> groups = {
        {FamilyLabel::Trojan, FamilyLabel::BackdoorRat, FamilyLabel::SpywareInfostealer,
         FamilyLabel::BotBotnetClient},
        {FamilyLabel::Dropper, FamilyLabel::Downloader},
        {FamilyLabel::Worm, FamilyLabel::Virus},
        {FamilyLabel::Ransomware},
        {FamilyLabel::PackedObfuscated},
    };
    return groups;
}

FamilyLabel lowest_rank(const std::vector<FamilyLabel>& tied,
                        const SpecificityTable& specificity) {
    FamilyLabel best = tied.front();
    for (FamilyLabel f : tied) {
        if (specificity.rank(f) < specificity.rank(best)) {
            best = f;
        }
    }
    return best;
}

}  // namespace

std::optional<FamilyLabel> oracle_decide(const std::vector<ModelPrediction>& preds,
                                         const WeightVector& weights,
                                         const SpecificityTable& specificity) {
    // Step 1-2: drop invalid or unmappable outputs.
    std::vector<std::pair<FamilyLabel, double>> kept;
    for (const ModelPrediction& p : preds) {
        if (p.prediction.valid()) {
            kept.emplace_back(*p.prediction.label, weights.at(p.model_id));
        }
    }
    if (kept.empty()) {
        return std::nullopt;
    }

    // Step 3: weighted family scores.
    double total = 0.0;
    for (const auto& [family, weight] : kept) {
        (void)family;
        total += weight;
    }
    std::map<FamilyLabel, double> scores;
    for (const auto& [family, weight] : kept) {
        scores[family] += weight;
    }

    // Step 4: strict family majority.
    for (FamilyLabel f : all_families()) {
        auto it = scores.find(f);
        if (it != scores.end() && it->second > total / 2.0) {
            return f;
        }
    }

    // Steps 5-6: behavior-group scores, then the best family inside the
    // winning group, ties to the specificity ranking.
    for (const std::vector<FamilyLabel>& group : oracle_groups()) {
        double group_score = 0.0;
        for (FamilyLabel f : group) {
            auto it = scores.find(f);
            if (it != scores.end()) {
                group_score += it->second;
            }
        }
        if (group_score > total / 2.0) {
            double best = 0.0;
            for (FamilyLabel f : group) {
                auto it = scores.find(f);
                if (it != scores.end() && it->second > best) {
                    best = it->second;
                }
            }
            std::vector<FamilyLabel> tied;
            for (FamilyLabel f : group) {
                auto it = scores.find(f);
                double s = it != scores.end() ? it->second : 0.0;
                if (s == best) {
                    tied.push_back(f);
                }
            }
            return lowest_rank(tied, specificity);
        }
    }

    // Step 7: remaining ties resolved by global specificity ranking.
    double best = 0.0;
    bool first = true;
    for (const auto& [family, score] : scores) {
        (void)family;
        if (first || score > best) {
            best = score;
            first = false;
        }
    }
    std::vector<FamilyLabel> tied;
    for (FamilyLabel f : all_families()) {
        auto it = scores.find(f);
        if (it != scores.end() && it->second == best) {
            tied.push_back(f);
        }
    }
    return lowest_rank(tied, specificity);
}

}  // namespace fixtures
}  // namespace malfam
