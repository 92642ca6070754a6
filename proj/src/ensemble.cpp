#include "malfam/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "malfam/errors.hpp"

namespace malfam {

namespace {

struct Participant {
    std::string model_id;
    FamilyLabel label;
    double weight;
};

/// Valid predictions joined with their weights, in input order. Throws for
/// unknown model ids and duplicate votes.
std::vector<Participant> participants_of(const std::vector<ModelPrediction>& preds,
                                         const WeightVector& weights) {
    std::vector<Participant> out;
    std::set<std::string> seen;
    for (const ModelPrediction& p : preds) {
        if (!seen.insert(p.model_id).second) {
            throw ConfigError("duplicate prediction for model '" + p.model_id + "'");
        }
        if (!p.prediction.valid()) {
            continue;
        }
        out.push_back({p.model_id, *p.prediction.label, weights.at(p.model_id)});
    }
    return out;
}

FamilyScores tally(const std::vector<Participant>& participants) {
    FamilyScores scores{};
    for (const Participant& p : participants) {
        scores[static_cast<std::size_t>(p.label)] += p.weight;
    }
    return scores;
}

GroupScores group_tally(const FamilyScores& family_scores) {
    GroupScores scores{};
    for (FamilyLabel f : all_families()) {
        scores[static_cast<std::size_t>(behavior_group_of(f))] +=
            family_scores[static_cast<std::size_t>(f)];
    }
    return scores;
}

/// Families that received at least one vote and hold the maximal score among
/// voted families. For positive weights this equals the globally maximal set,
/// since unvoted families score exactly 0.
std::vector<FamilyLabel> top_voted_families(const FamilyScores& scores,
                                            const std::vector<Participant>& participants) {
    std::set<FamilyLabel> voted;
    for (const Participant& p : participants) {
        voted.insert(p.label);
    }
    double best = -1.0;
    for (FamilyLabel f : voted) {
        best = std::max(best, scores[static_cast<std::size_t>(f)]);
    }
    std::vector<FamilyLabel> top;
    for (FamilyLabel f : all_families()) {
        if (voted.count(f) && scores[static_cast<std::size_t>(f)] == best) {
            top.push_back(f);
        }
    }
    return top;
}

EnsembleDecision unresolved_decision() {
    EnsembleDecision d;
    d.stage = DecisionStage::Unresolved;
    return d;
}

EnsembleDecision base_decision(const std::vector<Participant>& participants) {
    EnsembleDecision d;
    d.family_scores = tally(participants);
    d.group_scores = group_tally(d.family_scores);
    for (const Participant& p : participants) {
        d.participating_models.push_back(p.model_id);
    }
    std::sort(d.participating_models.begin(), d.participating_models.end());
    return d;
}

}  // namespace

WeightVector::WeightVector(std::map<std::string, double> weights)
    : weights_(std::move(weights)) {
    for (const auto& [id, w] : weights_) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw ConfigError("weight for model '" + id + "' must be a finite non-negative value");
        }
    }
}

WeightVector WeightVector::normalized(const std::map<std::string, double>& raw) {
    double sum = 0.0;
    for (const auto& [id, w] : raw) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw ConfigError("weight for model '" + id + "' must be a finite non-negative value");
        }
        sum += w;
    }
    if (sum <= 0.0) {
        throw ConfigError("cannot normalize weights: sum is not positive");
    }
    std::map<std::string, double> out;
    for (const auto& [id, w] : raw) {
        out[id] = w / sum;
    }
    return WeightVector(std::move(out));
}

double WeightVector::at(const std::string& model_id) const {
    auto it = weights_.find(model_id);
    if (it == weights_.end()) {
        throw ConfigError("no weight configured for model '" + model_id + "'");
    }
    return it->second;
}

bool WeightVector::contains(const std::string& model_id) const {
    return weights_.count(model_id) != 0;
}

double WeightVector::total() const {
    double sum = 0.0;
    for (const auto& [id, w] : weights_) {
        (void)id;
        sum += w;
    }
    return sum;
}

bool WeightVector::is_normalized(double tolerance) const {
    return std::abs(total() - 1.0) <= tolerance;
}

std::string_view to_string(DecisionStage stage) {
    switch (stage) {
        case DecisionStage::FamilyMajority: return "FAMILY_MAJORITY";
        case DecisionStage::GroupConsensus: return "GROUP_CONSENSUS";
        case DecisionStage::SpecificityTiebreak: return "SPECIFICITY_TIEBREAK";
        case DecisionStage::Unresolved: return "UNRESOLVED";
    }
    return "UNRESOLVED";
}

std::optional<DecisionStage> stage_from_string(std::string_view text) {
    for (DecisionStage s : {DecisionStage::FamilyMajority, DecisionStage::GroupConsensus,
                            DecisionStage::SpecificityTiebreak, DecisionStage::Unresolved}) {
        if (to_string(s) == text) return s;
    }
    return std::nullopt;
}

double score_of(const FamilyScores& scores, FamilyLabel family) {
    return scores[static_cast<std::size_t>(family)];
}

double score_of(const GroupScores& scores, BehaviorGroup group) {
    return scores[static_cast<std::size_t>(group)];
}

FamilyScores weighted_family_scores(const std::vector<ModelVote>& votes,
                                    const WeightVector& weights) {
    FamilyScores scores{};
    std::set<std::string> seen;
    for (const ModelVote& v : votes) {
        if (!seen.insert(v.model_id).second) {
            throw ConfigError("duplicate prediction for model '" + v.model_id + "'");
        }
        scores[static_cast<std::size_t>(v.label)] += weights.at(v.model_id);
    }
    return scores;
}

EnsembleDecision decide_hierarchical(const std::vector<ModelPrediction>& preds,
                                     const WeightVector& weights,
                                     const SpecificityTable& specificity,
                                     MajorityDenominator denominator) {
    std::vector<Participant> participants = participants_of(preds, weights);
    if (participants.empty()) {
        return unresolved_decision();
    }

    double threshold_total = 0.0;
    if (denominator == MajorityDenominator::ValidVoters) {
        for (const Participant& p : participants) {
            threshold_total += p.weight;
        }
    } else {
        for (const ModelPrediction& p : preds) {
            threshold_total += weights.at(p.model_id);
        }
    }
    const double half = threshold_total / 2.0;

    EnsembleDecision d = base_decision(participants);

    // Stage 1: strict weighted family majority. At most one family can
    // exceed half the total, so the winner is unique.
    for (FamilyLabel f : all_families()) {
        if (d.family_scores[static_cast<std::size_t>(f)] > half) {
            d.label = f;
            d.stage = DecisionStage::FamilyMajority;
            return d;
        }
    }

    // Stage 2: behavior-group consensus, then the strongest family within
    // the winning group; score ties fall to the specificity rank.
    for (BehaviorGroup g : all_groups()) {
        if (d.group_scores[static_cast<std::size_t>(g)] <= half) {
            continue;
        }
        double best = -1.0;
        for (FamilyLabel f : all_families()) {
            if (behavior_group_of(f) == g) {
                best = std::max(best, d.family_scores[static_cast<std::size_t>(f)]);
            }
        }
        std::vector<FamilyLabel> tied;
        for (FamilyLabel f : all_families()) {
            if (behavior_group_of(f) == g &&
                d.family_scores[static_cast<std::size_t>(f)] == best) {
                tied.push_back(f);
            }
        }
        d.label = specificity.most_specific(tied);
        d.stage = tied.size() > 1 ? DecisionStage::SpecificityTiebreak
                                  : DecisionStage::GroupConsensus;
        return d;
    }

    // Stage 3: no majority anywhere; most specific of the top-scoring
    // families wins.
    std::vector<FamilyLabel> top = top_voted_families(d.family_scores, participants);
    d.label = specificity.most_specific(top);
    d.stage = DecisionStage::SpecificityTiebreak;
    return d;
}

EnsembleDecision decide_flat(const std::vector<ModelPrediction>& preds,
                             const WeightVector& weights,
                             const SpecificityTable& specificity,
                             FlatMode mode) {
    WeightVector effective = weights;
    if (mode == FlatMode::Uniform) {
        std::map<std::string, double> uniform;
        std::set<std::string> seen;
        for (const ModelPrediction& p : preds) {
            if (!seen.insert(p.model_id).second) {
                throw ConfigError("duplicate prediction for model '" + p.model_id + "'");
            }
            if (p.prediction.valid()) {
                uniform[p.model_id] = 1.0;
            }
        }
        if (uniform.empty()) {
            return unresolved_decision();
        }
        effective = WeightVector::normalized(uniform);
    }

    std::vector<Participant> participants = participants_of(preds, effective);
    if (participants.empty()) {
        return unresolved_decision();
    }

    EnsembleDecision d = base_decision(participants);
    std::vector<FamilyLabel> top = top_voted_families(d.family_scores, participants);
    d.label = specificity.most_specific(top);
    d.stage = top.size() > 1 ? DecisionStage::SpecificityTiebreak
                             : DecisionStage::FamilyMajority;
    return d;
}

}  // namespace malfam
