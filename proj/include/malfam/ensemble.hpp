#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "malfam/normalizer.hpp"
#include "malfam/taxonomy.hpp"

namespace malfam {

/// Per-model reliability weights. Calibrated vectors are normalized to sum
/// to 1; the decision functions themselves only require non-negativity, so
/// decisions are invariant under positive rescaling.
class WeightVector {
public:
    WeightVector() = default;
    explicit WeightVector(std::map<std::string, double> weights);

    /// Divides by the sum; throws ConfigError when the sum is not positive.
    static WeightVector normalized(const std::map<std::string, double>& raw);

    /// Throws ConfigError for an unknown model id.
    double at(const std::string& model_id) const;
    bool contains(const std::string& model_id) const;
    double total() const;
    bool is_normalized(double tolerance = 1e-9) const;
    std::size_t size() const { return weights_.size(); }

    const std::map<std::string, double>& weights() const { return weights_; }

private:
    std::map<std::string, double> weights_;
};

enum class DecisionStage : std::uint8_t {
    FamilyMajority = 0,
    GroupConsensus,
    SpecificityTiebreak,
    Unresolved,
};

std::string_view to_string(DecisionStage stage);
std::optional<DecisionStage> stage_from_string(std::string_view text);

using FamilyScores = std::array<double, kFamilyCount>;
using GroupScores = std::array<double, kGroupCount>;

double score_of(const FamilyScores& scores, FamilyLabel family);
double score_of(const GroupScores& scores, BehaviorGroup group);

/// Final label plus full provenance: which stage decided, the family and
/// group score vectors, and which models took part.
struct EnsembleDecision {
    std::optional<FamilyLabel> label;
    DecisionStage stage = DecisionStage::Unresolved;
    FamilyScores family_scores{};
    GroupScores group_scores{};
    std::vector<std::string> participating_models;

    bool resolved() const { return label.has_value(); }
};

struct ModelVote {
    std::string model_id;
    FamilyLabel label;
};

struct ModelPrediction {
    std::string model_id;
    NormalizedPrediction prediction;
};

/// Whether the majority threshold W/2 sums over valid voters only (invalid
/// outputs removed first) or over every model in the run.
enum class MajorityDenominator : std::uint8_t {
    ValidVoters = 0,
    AllModels,
};

enum class FlatMode : std::uint8_t {
    Uniform = 0,
    Weighted,
};

/// S(f) = sum of weights of the models voting f; unvoted families score 0.
/// Requires a weight for every voting model and at most one vote per model.
FamilyScores weighted_family_scores(const std::vector<ModelVote>& votes,
                                    const WeightVector& weights);

/// Three-stage decision: strict weighted family majority, then behavior-group
/// consensus with within-group selection, then global specificity tie-break.
/// All-invalid input yields an unresolved decision, never a guess.
EnsembleDecision decide_hierarchical(const std::vector<ModelPrediction>& preds,
                                     const WeightVector& weights,
                                     const SpecificityTable& specificity,
                                     MajorityDenominator denominator =
                                         MajorityDenominator::ValidVoters);

/// Single-stage plurality over S(f); score ties fall to the specificity
/// rank. Uniform mode ignores the supplied weights and gives every
/// participating model an equal share.
EnsembleDecision decide_flat(const std::vector<ModelPrediction>& preds,
                             const WeightVector& weights,
                             const SpecificityTable& specificity,
                             FlatMode mode);

}  // namespace malfam
