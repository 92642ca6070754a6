#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "malfam/taxonomy.hpp"

namespace malfam {

enum class InvalidReason : std::uint8_t {
    None = 0,
    Empty,
    Unmappable,
    MultiLabel,
    FormatArtifactOnly,
};

std::string_view to_string(InvalidReason reason);
std::optional<InvalidReason> invalid_reason_from_string(std::string_view text);

/// Outcome of normalizing one raw model response. Invalidity is a value,
/// never an exception; raw_text is kept verbatim for audit.
struct NormalizedPrediction {
    std::optional<FamilyLabel> label;
    InvalidReason reason = InvalidReason::None;
    std::string raw_text;

    bool valid() const { return label.has_value(); }

    static NormalizedPrediction valid_of(FamilyLabel family, std::string raw);
    static NormalizedPrediction invalid_of(InvalidReason reason, std::string raw);
};

/// Resolves arbitrary response text to a canonical family, or an explicit
/// invalidity verdict. Deterministic and case-insensitive:
///   1. strip markdown code fences and inline backticks
///   2. trim whitespace/trailing punctuation and a leading "Family:" echo
///   3. lowercase
///   4. exact synonym-table match
///   5. fallback: word-boundary alias scan over the full text (longer alias
///      occurrences suppress shorter ones they contain)
///   6. one distinct family -> valid; zero -> empty/unmappable;
///      several -> multi-label
NormalizedPrediction normalize(std::string_view raw, const SynonymTable& synonyms);

/// Steps 1-4 only; the free-text scan is disabled. Used for gold labels,
/// where anything short of an exact canonical or synonym match is an error.
NormalizedPrediction normalize_strict(std::string_view raw, const SynonymTable& synonyms);

}  // namespace malfam
