#include "malfam/fixtures.hpp"

#include <algorithm>
#include <random>

#include "malfam/errors.hpp"
#include "malfam/util.hpp"

namespace malfam {
namespace fixtures {

namespace {

/// Mixed-case emission variants the normalizer maps back to each family.
const std::vector<std::string>& alias_pool(FamilyLabel family) {
    static const std::array<std::vector<std::string>, kFamilyCount> pools = {{
        /* Trojan            */ {"trojan", "TROJAN"},
        /* Worm              */ {"worm", "Worm"},
        /* Virus             */ {"virus", "VIRUS"},
        /* Ransomware        */ {"ransomware", "RANSOMWARE"},
        /* BackdoorRat       */ {"RAT", "Backdoor", "remote access trojan"},
        /* Dropper           */ {"dropper", "DROPPER"},
        /* Downloader        */ {"downloader", "Downloader"},
        /* PackedObfuscated  */ {"packed", "obfuscated", "Packed Malware"},
        /* SpywareInfostealer*/ {"spyware", "Infostealer", "stealer"},
        /* BotBotnetClient   */ {"bot", "Botnet Client", "BOTNET"},
    }};
    return pools[static_cast<std::size_t>(family)];
}

const std::vector<std::string>& import_pool(FamilyLabel family) {
    static const std::array<std::vector<std::string>, kFamilyCount> pools = {{
        {"CreateProcessA", "WriteProcessMemory", "RegSetValueExA", "GetProcAddress"},
        {"WNetEnumResourceA", "CopyFileA", "NetShareEnum", "GetLogicalDrives"},
        {"FindFirstFileA", "CreateFileMappingA", "WriteFile", "SetFilePointer"},
        {"CryptEncrypt", "CryptGenKey", "DeleteFileA", "FindNextFileW"},
        {"WSASocketA", "CreateRemoteThread", "RegCreateKeyExA", "InternetConnectA"},
        {"CreateFileA", "WriteFile", "ShellExecuteA", "GetTempPathA"},
        {"URLDownloadToFileA", "InternetOpenUrlA", "WinExec", "HttpSendRequestA"},
        {"VirtualAlloc", "VirtualProtect", "LoadLibraryA", "IsDebuggerPresent"},
        {"GetAsyncKeyState", "GetForegroundWindow", "InternetWriteFile", "GetClipboardData"},
        {"connect", "send", "recv", "gethostbyname"},
    }};
    return pools[static_cast<std::size_t>(family)];
}

/// Per-key RNG so generation order never affects the bytes.
std::mt19937_64 keyed_rng(std::uint64_t seed, std::string_view a, std::string_view b,
                          std::string_view c) {
    std::uint64_t h = fnv1a64(a, seed ^ 0x9e3779b97f4a7c15ULL);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(b, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(c, h);
    return std::mt19937_64(h);
}

double draw_unit(std::mt19937_64& rng) { return unit_double(rng()); }

std::size_t draw_index(std::mt19937_64& rng, std::size_t size) {
    return static_cast<std::size_t>(rng() % size);
}

FamilyLabel draw_family(std::mt19937_64& rng,
                        const std::array<double, kFamilyCount>& distribution) {
    double u = draw_unit(rng);
    double cumulative = 0.0;
    for (std::size_t i = 0; i < kFamilyCount; ++i) {
        cumulative += distribution[i];
        if (u < cumulative) {
            return static_cast<FamilyLabel>(i);
        }
    }
    return static_cast<FamilyLabel>(kFamilyCount - 1);  // rounding slack
}

}  // namespace

SyntheticJudgeProfile SyntheticJudgeProfile::with_cluster_confusion(
    std::string model_id, double accuracy, double cluster_share, JudgeQuirks quirks,
    std::uint64_t seed) {
    if (accuracy < 0.0 || accuracy > 1.0 || cluster_share < 0.0 || cluster_share > 1.0) {
        throw ConfigError("profile '" + model_id + "': rates must lie in [0, 1]");
    }
    SyntheticJudgeProfile profile;
    profile.model_id = std::move(model_id);
    profile.quirks = quirks;
    profile.seed = seed;

    for (FamilyLabel gold : all_families()) {
        const std::size_t g = static_cast<std::size_t>(gold);
        std::vector<std::size_t> cluster;
        std::vector<std::size_t> rest;
        for (FamilyLabel other : all_families()) {
            if (other == gold) {
                continue;
            }
            if (behavior_group_of(other) == behavior_group_of(gold)) {
                cluster.push_back(static_cast<std::size_t>(other));
            } else {
                rest.push_back(static_cast<std::size_t>(other));
            }
        }
        double error_mass = 1.0 - accuracy;
        double cluster_mass = cluster.empty() ? 0.0 : error_mass * cluster_share;
        double rest_mass = error_mass - cluster_mass;

        profile.emission[g][g] = accuracy;
        for (std::size_t e : cluster) {
            profile.emission[g][e] = cluster_mass / static_cast<double>(cluster.size());
        }
        for (std::size_t e : rest) {
            profile.emission[g][e] = rest_mass / static_cast<double>(rest.size());
        }
    }
    return profile;
}

const std::vector<SyntheticJudgeProfile>& default_profiles() {
    static const std::vector<SyntheticJudgeProfile> profiles = [] {
        std::vector<SyntheticJudgeProfile> out;
        // Accuracies are tuned so the measured fixture accuracies (with the
        // Trojan/Backdoor merge and invalid-counts-as-wrong) land around
        // 0.70 / 0.42 / 0.72 / 0.67.
        out.push_back(SyntheticJudgeProfile::with_cluster_confusion(
            "qwen-sim", 0.64, 0.55, JudgeQuirks{0.05, 0.10, 0.05, 0.02}, 11));
        out.push_back(SyntheticJudgeProfile::with_cluster_confusion(
            "codellama-sim", 0.40, 0.30, JudgeQuirks{0.02, 0.05, 0.25, 0.12}, 12));
        out.push_back(SyntheticJudgeProfile::with_cluster_confusion(
            "gpt41-sim", 0.66, 0.60, JudgeQuirks{0.12, 0.08, 0.04, 0.01}, 13));
        out.push_back(SyntheticJudgeProfile::with_cluster_confusion(
            "gpt51-sim", 0.60, 0.58, JudgeQuirks{0.10, 0.30, 0.10, 0.02}, 14));
        return out;
    }();
    return profiles;
}

std::vector<GoldRecord> table_distribution_gold() {
    static const std::vector<std::pair<FamilyLabel, std::size_t>> counts = {
        {FamilyLabel::Trojan, 82},
        {FamilyLabel::BackdoorRat, 44},
        {FamilyLabel::SpywareInfostealer, 42},
        {FamilyLabel::Downloader, 11},
        {FamilyLabel::Worm, 6},
        {FamilyLabel::BotBotnetClient, 5},
        {FamilyLabel::Ransomware, 4},
        {FamilyLabel::Dropper, 4},
        {FamilyLabel::PackedObfuscated, 2},
    };
    std::vector<FamilyLabel> labels;
    for (const auto& [family, count] : counts) {
        labels.insert(labels.end(), count, family);
    }

    // Deterministic interleave so families are not block-ordered by id.
    std::mt19937_64 rng(kFixtureSeed);
    for (std::size_t i = labels.size() - 1; i > 0; --i) {
        std::swap(labels[i], labels[draw_index(rng, i + 1)]);
    }

    std::vector<GoldRecord> gold;
    gold.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        char id[16];
        std::snprintf(id, sizeof(id), "s%04zu", i + 1);
        gold.push_back({id, labels[i]});
    }
    return gold;
}

std::vector<SampleRecord> generate_fixture_samples(const std::vector<GoldRecord>& gold,
                                                   std::uint64_t seed) {
    std::vector<SampleRecord> samples;
    samples.reserve(gold.size());
    for (const GoldRecord& record : gold) {
        std::mt19937_64 rng = keyed_rng(seed, record.sample_id, "sample", "");
        const auto& pool = import_pool(record.label);

        SampleRecord sample;
        sample.sample_id = record.sample_id;
        std::size_t n_imports = 2 + draw_index(rng, pool.size() - 1);
        for (std::size_t i = 0; i < n_imports; ++i) {
            sample.api_imports.push_back(pool[i]);
        }
        const std::string stage = "stage_" + std::to_string(draw_index(rng, 9000) + 1000);
        sample.source_code =
            "// sample " + record.sample_id + "\n"
            "#include <windows.h>\n\n"
            "static void " + stage + "(void) {\n"
            "    /* synthetic fixture body */\n"
            "}\n\n"
            "int main(void) {\n"
            "    " + stage + "();\n"
            "    return " + std::to_string(draw_index(rng, 2)) + ";\n"
            "}\n";
        samples.push_back(std::move(sample));
    }
    return samples;
}

std::string synthesize_response(const SyntheticJudgeProfile& profile, FamilyLabel gold_label,
                                const std::string& sample_id, const std::string& prompt_id,
                                std::uint64_t seed) {
    std::mt19937_64 rng =
        keyed_rng(seed ^ profile.seed, sample_id, profile.model_id, prompt_id);

    FamilyLabel emitted =
        draw_family(rng, profile.emission[static_cast<std::size_t>(gold_label)]);

    if (draw_unit(rng) < profile.quirks.empty_rate) {
        return "";
    }

    std::string text(display_name(emitted));
    if (draw_unit(rng) < profile.quirks.synonym_rate) {
        const auto& pool = alias_pool(emitted);
        text = pool[draw_index(rng, pool.size())];
    }
    if (draw_unit(rng) < profile.quirks.explanation_rate) {
        // Wording must stay free of other family aliases.
        text = "This sample is classified as " + text + " based on the imported APIs.";
    }
    if (draw_unit(rng) < profile.quirks.fence_rate) {
        text = "```\n" + text + "\n```";
    }
    return text;
}

void generate_fixture_cache(const std::vector<SyntheticJudgeProfile>& profiles,
                            const std::vector<SampleRecord>& samples,
                            const std::vector<GoldRecord>& gold, const std::string& prompt_id,
                            std::uint64_t seed, ResponseCache& cache) {
    if (profiles.empty()) {
        throw ConfigError("generate_fixture_cache: no judge profiles");
    }
    std::map<std::string, FamilyLabel> gold_by_id;
    for (const GoldRecord& record : gold) {
        gold_by_id[record.sample_id] = record.label;
    }

    for (const SyntheticJudgeProfile& profile : profiles) {
        for (const SampleRecord& sample : samples) {
            auto it = gold_by_id.find(sample.sample_id);
            if (it == gold_by_id.end()) {
                throw DataError("generate_fixture_cache: sample '" + sample.sample_id +
                                "' has no gold label");
            }
            CacheEntry entry;
            entry.response_text =
                synthesize_response(profile, it->second, sample.sample_id, prompt_id, seed);
            entry.endpoint = "fixture://" + profile.model_id;
            entry.status = 200;
            entry.latency_ms = 0.0;
            cache.store({sample.sample_id, profile.model_id, prompt_id}, entry);
        }
    }
}

}  // namespace fixtures
}  // namespace malfam
