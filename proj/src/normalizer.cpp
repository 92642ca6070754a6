#include "malfam/normalizer.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <vector>

#include "malfam/util.hpp"

namespace malfam {

namespace {

bool is_word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

std::string strip_markdown(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (const std::string& line : split_lines(raw)) {
        std::string t = trim(line);
        if (t.rfind("```", 0) == 0) {
            continue;  // fence line; any language tag goes with it
        }
        out += line;
        out.push_back('\n');
    }
    std::erase(out, '`');
    return out;
}

std::string strip_echo_and_punctuation(std::string_view text) {
    std::string s = trim(text);
    // Models frequently echo the prompt's final token.
    static constexpr std::string_view kEcho = "family:";
    if (s.size() >= kEcho.size()) {
        std::string head = lowercase_ascii(std::string_view(s).substr(0, kEcho.size()));
        if (head == kEcho) {
            s = trim(std::string_view(s).substr(kEcho.size()));
        }
    }
    while (!s.empty()) {
        char c = s.back();
        if (c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' ||
            c == '"' || c == '\'' || c == ')') {
            s.pop_back();
        } else {
            break;
        }
    }
    return trim(s);
}

struct AliasHit {
    std::size_t begin;
    std::size_t end;
    FamilyLabel family;
};

/// All word-boundary occurrences of every alias, with occurrences fully
/// contained inside a longer occurrence dropped ("remote access trojan"
/// must not also fire "trojan").
std::vector<AliasHit> scan_aliases(const std::string& text, const SynonymTable& synonyms) {
    std::vector<AliasHit> hits;
    for (const auto& [alias, family] : synonyms.entries()) {
        std::size_t pos = 0;
        while ((pos = text.find(alias, pos)) != std::string::npos) {
            bool left_ok = pos == 0 || !is_word_char(text[pos - 1]);
            std::size_t end = pos + alias.size();
            bool right_ok = end == text.size() || !is_word_char(text[end]);
            if (left_ok && right_ok) {
                hits.push_back({pos, end, family});
            }
            ++pos;
        }
    }
    std::vector<AliasHit> kept;
    for (const AliasHit& h : hits) {
        bool contained = std::any_of(hits.begin(), hits.end(), [&](const AliasHit& other) {
            bool longer = (other.end - other.begin) > (h.end - h.begin);
            return longer && other.begin <= h.begin && h.end <= other.end;
        });
        if (!contained) kept.push_back(h);
    }
    return kept;
}

NormalizedPrediction classify(std::string_view raw, const SynonymTable& synonyms,
                              bool allow_scan) {
    std::string original(raw);
    if (trim(raw).empty()) {
        return NormalizedPrediction::invalid_of(InvalidReason::Empty, std::move(original));
    }

    std::string cleaned = strip_echo_and_punctuation(strip_markdown(raw));
    if (cleaned.empty()) {
        return NormalizedPrediction::invalid_of(InvalidReason::FormatArtifactOnly,
                                                std::move(original));
    }

    std::string canonical = collapse_whitespace(lowercase_ascii(cleaned));
    if (auto family = synonyms.lookup(canonical)) {
        return NormalizedPrediction::valid_of(*family, std::move(original));
    }
    if (!allow_scan) {
        return NormalizedPrediction::invalid_of(InvalidReason::Unmappable, std::move(original));
    }

    std::set<FamilyLabel> families;
    for (const AliasHit& hit : scan_aliases(canonical, synonyms)) {
        families.insert(hit.family);
    }
    if (families.size() == 1) {
        return NormalizedPrediction::valid_of(*families.begin(), std::move(original));
    }
    if (families.empty()) {
        return NormalizedPrediction::invalid_of(InvalidReason::Unmappable, std::move(original));
    }
    return NormalizedPrediction::invalid_of(InvalidReason::MultiLabel, std::move(original));
}

}  // namespace

std::string_view to_string(InvalidReason reason) {
    switch (reason) {
        case InvalidReason::None: return "none";
        case InvalidReason::Empty: return "empty";
        case InvalidReason::Unmappable: return "unmappable";
        case InvalidReason::MultiLabel: return "multi-label";
        case InvalidReason::FormatArtifactOnly: return "format-artifact-only";
    }
    return "unmappable";
}

std::optional<InvalidReason> invalid_reason_from_string(std::string_view text) {
    for (InvalidReason r : {InvalidReason::None, InvalidReason::Empty, InvalidReason::Unmappable,
                            InvalidReason::MultiLabel, InvalidReason::FormatArtifactOnly}) {
        if (to_string(r) == text) return r;
    }
    return std::nullopt;
}

NormalizedPrediction NormalizedPrediction::valid_of(FamilyLabel family, std::string raw) {
    NormalizedPrediction p;
    p.label = family;
    p.reason = InvalidReason::None;
    p.raw_text = std::move(raw);
    return p;
}

NormalizedPrediction NormalizedPrediction::invalid_of(InvalidReason reason, std::string raw) {
    NormalizedPrediction p;
    p.reason = reason;
    p.raw_text = std::move(raw);
    return p;
}

NormalizedPrediction normalize(std::string_view raw, const SynonymTable& synonyms) {
    return classify(raw, synonyms, /*allow_scan=*/true);
}

NormalizedPrediction normalize_strict(std::string_view raw, const SynonymTable& synonyms) {
    return classify(raw, synonyms, /*allow_scan=*/false);
}

}  // namespace malfam
