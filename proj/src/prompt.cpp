#include "malfam/prompt.hpp"

#include <array>
#include <map>

#include "malfam/errors.hpp"

namespace malfam {

namespace {

constexpr std::string_view kFamilyList =
    "Trojan; Worm; Virus; Ransomware; Backdoor / Remote Access Trojan;\n"
    "Dropper; Downloader; Packed / Obfuscated Malware;\n"
    "Spyware / Infostealer; Bot / Botnet Client";

constexpr std::string_view kInputFields =
    "Source code: [truncated]\n"
    "Detected imports: [API list]\n"
    "Family:";

const std::map<std::string, std::string, std::less<>>& builtin_bodies() {
    static const std::map<std::string, std::string, std::less<>> bodies = [] {
        std::map<std::string, std::string, std::less<>> m;
        m["P0"] =
            "Classify the following malware program into exactly ONE of these\n"
            "malware families:\n" +
            std::string(kFamilyList) +
            "\n"
            "Respond with the family name only. Do not include explanations or any\n"
            "additional text.\n" +
            std::string(kInputFields);
        m["P1"] =
            "You are a malware analysis expert.\n"
            "Determine which malware family best describes the following program\n"
            "based on its behavior and functionality.\n"
            "Choose exactly ONE label from this list:\n" +
            std::string(kFamilyList) +
            "\n"
            "Consider indicators such as persistence mechanisms, network\n"
            "communication, credential harvesting, payload delivery, encryption,\n"
            "and command-and-control behavior.\n"
            "Return ONLY the exact family name from the list above.\n" +
            std::string(kInputFields);
        m["P2"] =
            "Classify the malware program below into exactly ONE of the following families:\n" +
            std::string(kFamilyList) +
            "\n"
            "Use only the source code and API imports to make your decision.\n"
            "Output ONLY the family name. No explanation.\n" +
            std::string(kInputFields);
        m["P3"] =
            "You are a threat intelligence analyst performing malware family attribution.\n"
            "Based on the program’s code structure, API usage, and inferred malicious\n"
            "intent, assign the most appropriate malware family.\n"
            "Select exactly ONE family from the list:\n" +
            std::string(kFamilyList) +
            "\n"
            "Do not include explanations, qualifiers, or multiple labels.\n" +
            std::string(kInputFields);
        m["P4"] =
            "You are classifying a malware sample into one family using strict\n"
            "decision rules.\n"
            "Rules:\n"
            "Choose exactly ONE family from the list below.\n"
            "Base your decision only on observable behavior inferred from the code\n"
            "and the APIs.\n"
            "Do not output anything except the family name.\n"
            "Malware families:\n" +
            std::string(kFamilyList) + "\n" + std::string(kInputFields);
        m["P5"] =
            "You are a malware classification system.\n"
            "Your task is to distinguish between overlapping malware behaviors\n"
            "(e.g., Trojan vs Backdoor vs Spyware) and select the single most specific family.\n"
            "Choose exactly ONE label from the following list:\n" +
            std::string(kFamilyList) +
            "\n"
            "Prefer the most behaviorally informative label when multiple families\n"
            "seem plausible.\n"
            "Return ONLY the family name.\n" +
            std::string(kInputFields);
        return m;
    }();
    return bodies;
}

std::size_t count_occurrences(std::string_view haystack, std::string_view needle) {
    std::size_t count = 0;
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string_view::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

}  // namespace

void PromptTemplate::validate() const {
    if (count_occurrences(body, kSourcePlaceholder) != 1) {
        throw ConfigError("prompt '" + id + "' must contain exactly one '" +
                          std::string(kSourcePlaceholder) + "' placeholder");
    }
    if (count_occurrences(body, kImportsPlaceholder) != 1) {
        throw ConfigError("prompt '" + id + "' must contain exactly one '" +
                          std::string(kImportsPlaceholder) + "' placeholder");
    }
    if (!body.ends_with(kTerminalToken)) {
        throw ConfigError("prompt '" + id + "' must end with '" +
                          std::string(kTerminalToken) + "'");
    }
    if (max_input_chars == 0) {
        throw ConfigError("prompt '" + id + "' must allow at least one input character");
    }
}

PromptTemplate PromptTemplate::builtin(std::string_view id) {
    const auto& bodies = builtin_bodies();
    auto it = bodies.find(id);
    if (it == bodies.end()) {
        throw ConfigError("unknown prompt id '" + std::string(id) +
                          "' (expected one of P0..P5)");
    }
    PromptTemplate prompt{std::string(id), it->second};
    prompt.validate();
    return prompt;
}

const std::vector<std::string>& PromptTemplate::builtin_ids() {
    static const std::vector<std::string> ids = {"P0", "P1", "P2", "P3", "P4", "P5"};
    return ids;
}

std::string render_prompt(const PromptTemplate& prompt, const SampleRecord& sample) {
    prompt.validate();
    std::string source = sample.source_code.substr(
        0, std::min(sample.source_code.size(), prompt.max_input_chars));
    std::string imports;
    for (std::size_t i = 0; i < sample.api_imports.size(); ++i) {
        if (i > 0) {
            imports += ", ";
        }
        imports += sample.api_imports[i];
    }
    // Splice by positions taken from the pristine template so substituted
    // content can never masquerade as a placeholder.
    struct Slot {
        std::size_t pos;
        std::size_t len;
        const std::string* value;
    };
    std::array<Slot, 2> slots = {
        Slot{prompt.body.find(PromptTemplate::kSourcePlaceholder),
             PromptTemplate::kSourcePlaceholder.size(), &source},
        Slot{prompt.body.find(PromptTemplate::kImportsPlaceholder),
             PromptTemplate::kImportsPlaceholder.size(), &imports},
    };
    if (slots[0].pos > slots[1].pos) {
        std::swap(slots[0], slots[1]);
    }
    std::string rendered;
    rendered.reserve(prompt.body.size() + source.size() + imports.size());
    rendered.append(prompt.body, 0, slots[0].pos);
    rendered.append(*slots[0].value);
    rendered.append(prompt.body, slots[0].pos + slots[0].len,
                    slots[1].pos - slots[0].pos - slots[0].len);
    rendered.append(*slots[1].value);
    rendered.append(prompt.body, slots[1].pos + slots[1].len, std::string::npos);
    return rendered;
}

}  // namespace malfam
