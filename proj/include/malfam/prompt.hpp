#pragma once

#include <string>
#include <vector>

#include "malfam/corpus.hpp"

namespace malfam {

/// A zero-shot classification prompt. The body carries exactly one source
/// placeholder ("[truncated]") and one imports placeholder ("[API list]")
/// and ends with the literal token "Family:".
struct PromptTemplate {
    static constexpr std::string_view kSourcePlaceholder = "[truncated]";
    static constexpr std::string_view kImportsPlaceholder = "[API list]";
    static constexpr std::string_view kTerminalToken = "Family:";

    std::string id;
    std::string body;
    std::size_t max_input_chars = 12000;

    /// Throws ConfigError when the placeholder/terminal invariants fail.
    void validate() const;

    /// Built-in templates P0 (baseline) and P1..P5 (the sensitivity-sweep
    /// variants). Unknown ids throw ConfigError.
    static PromptTemplate builtin(std::string_view id);

    static const std::vector<std::string>& builtin_ids();
};

/// Substitutes the sample into the template. Source code is truncated to
/// max_input_chars first; imports join comma-separated in input order.
/// Byte-deterministic for fixed inputs.
std::string render_prompt(const PromptTemplate& prompt, const SampleRecord& sample);

}  // namespace malfam
