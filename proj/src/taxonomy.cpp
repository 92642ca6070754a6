#include "malfam/taxonomy.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "malfam/errors.hpp"
#include "malfam/util.hpp"

namespace malfam {

namespace {

constexpr std::array<std::string_view, kFamilyCount> kFamilyNames = {
    "Trojan",
    "Worm",
    "Virus",
    "Ransomware",
    "Backdoor / Remote Access Trojan",
    "Dropper",
    "Downloader",
    "Packed / Obfuscated Malware",
    "Spyware / Infostealer",
    "Bot / Botnet Client",
};

constexpr std::array<std::string_view, kGroupCount> kGroupNames = {
    "TROJAN_LIKE",
    "INSTALLER",
    "SELF_REPLICATING",
    "RANSOMWARE",
    "OBFUSCATED",
};

}  // namespace

const std::array<FamilyLabel, kFamilyCount>& all_families() {
    static const std::array<FamilyLabel, kFamilyCount> families = [] {
        std::array<FamilyLabel, kFamilyCount> out{};
        for (std::size_t i = 0; i < kFamilyCount; ++i) {
            out[i] = static_cast<FamilyLabel>(i);
        }
        return out;
    }();
    return families;
}

std::string_view display_name(FamilyLabel family) {
    return kFamilyNames[static_cast<std::size_t>(family)];
}

std::optional<FamilyLabel> family_from_display(std::string_view display) {
    for (std::size_t i = 0; i < kFamilyCount; ++i) {
        if (kFamilyNames[i] == display) {
            return static_cast<FamilyLabel>(i);
        }
    }
    return std::nullopt;
}

const std::array<BehaviorGroup, kGroupCount>& all_groups() {
    static const std::array<BehaviorGroup, kGroupCount> groups = [] {
        std::array<BehaviorGroup, kGroupCount> out{};
        for (std::size_t i = 0; i < kGroupCount; ++i) {
            out[i] = static_cast<BehaviorGroup>(i);
        }
        return out;
    }();
    return groups;
}

std::string_view display_name(BehaviorGroup group) {
    return kGroupNames[static_cast<std::size_t>(group)];
}

BehaviorGroup behavior_group_of(FamilyLabel family) {
    switch (family) {
        case FamilyLabel::Trojan:
        case FamilyLabel::BackdoorRat:
        case FamilyLabel::SpywareInfostealer:
        case FamilyLabel::BotBotnetClient:
            return BehaviorGroup::TrojanLike;
        case FamilyLabel::Dropper:
        case FamilyLabel::Downloader:
            return BehaviorGroup::Installer;
        case FamilyLabel::Worm:
        case FamilyLabel::Virus:
            return BehaviorGroup::SelfReplicating;
        case FamilyLabel::Ransomware:
            return BehaviorGroup::Ransomware;
        case FamilyLabel::PackedObfuscated:
            return BehaviorGroup::Obfuscated;
    }
    throw ConfigError("behavior_group_of: invalid family value");
}

const SpecificityTable& SpecificityTable::defaults() {
    static const SpecificityTable table = from_ranks({
        {FamilyLabel::Ransomware, 1},
        {FamilyLabel::BotBotnetClient, 2},
        {FamilyLabel::SpywareInfostealer, 3},
        {FamilyLabel::BackdoorRat, 4},
        {FamilyLabel::Downloader, 5},
        {FamilyLabel::Dropper, 6},
        {FamilyLabel::Worm, 7},
        {FamilyLabel::Virus, 8},
        {FamilyLabel::PackedObfuscated, 9},
        {FamilyLabel::Trojan, 10},
    });
    return table;
}

SpecificityTable SpecificityTable::from_ranks(const std::map<FamilyLabel, int>& ranks) {
    if (ranks.size() != kFamilyCount) {
        throw ConfigError("specificity table must rank all " + std::to_string(kFamilyCount) +
                          " families, got " + std::to_string(ranks.size()));
    }
    SpecificityTable table;
    std::set<int> seen;
    for (const auto& [family, rank] : ranks) {
        if (rank <= 0) {
            throw ConfigError("specificity rank must be positive for " +
                              std::string(display_name(family)));
        }
        if (!seen.insert(rank).second) {
            throw ConfigError("specificity ranks must be distinct, duplicate rank " +
                              std::to_string(rank));
        }
        table.ranks_[static_cast<std::size_t>(family)] = rank;
    }
    if (table.rank(FamilyLabel::BackdoorRat) >= table.rank(FamilyLabel::Trojan)) {
        throw ConfigError("specificity table must rank Backdoor / Remote Access Trojan "
                          "ahead of Trojan");
    }
    if (table.rank(FamilyLabel::Downloader) >= table.rank(FamilyLabel::Dropper)) {
        throw ConfigError("specificity table must rank Downloader ahead of Dropper");
    }
    return table;
}

int SpecificityTable::rank(FamilyLabel family) const {
    return ranks_[static_cast<std::size_t>(family)];
}

FamilyLabel SpecificityTable::most_specific(const std::vector<FamilyLabel>& candidates) const {
    if (candidates.empty()) {
        throw ConfigError("most_specific: empty candidate set");
    }
    return *std::min_element(candidates.begin(), candidates.end(),
                             [this](FamilyLabel a, FamilyLabel b) { return rank(a) < rank(b); });
}

const SynonymTable& SynonymTable::defaults() {
    static const SynonymTable table = [] {
        SynonymTable t;
        for (FamilyLabel family : all_families()) {
            t.add(display_name(family), family);
        }
        t.add("rat", FamilyLabel::BackdoorRat);
        t.add("backdoor", FamilyLabel::BackdoorRat);
        t.add("remote access trojan", FamilyLabel::BackdoorRat);
        t.add("spyware", FamilyLabel::SpywareInfostealer);
        t.add("infostealer", FamilyLabel::SpywareInfostealer);
        t.add("stealer", FamilyLabel::SpywareInfostealer);
        t.add("keylogger", FamilyLabel::SpywareInfostealer);
        t.add("bot", FamilyLabel::BotBotnetClient);
        t.add("botnet", FamilyLabel::BotBotnetClient);
        t.add("botnet client", FamilyLabel::BotBotnetClient);
        t.add("packed", FamilyLabel::PackedObfuscated);
        t.add("obfuscated", FamilyLabel::PackedObfuscated);
        t.add("packed malware", FamilyLabel::PackedObfuscated);
        t.add("downloader", FamilyLabel::Downloader);
        t.add("dropper", FamilyLabel::Dropper);
        return t;
    }();
    return table;
}

void SynonymTable::add(std::string_view alias, FamilyLabel family) {
    std::string key = collapse_whitespace(lowercase_ascii(alias));
    if (key.empty()) {
        throw ConfigError("synonym alias must be non-empty");
    }
    auto [it, inserted] = entries_.emplace(std::move(key), family);
    if (!inserted && it->second != family) {
        throw ConfigError("synonym alias '" + it->first + "' already maps to " +
                          std::string(display_name(it->second)));
    }
}

std::optional<FamilyLabel> SynonymTable::lookup(std::string_view alias_lowercase) const {
    auto it = entries_.find(std::string(alias_lowercase));
    if (it == entries_.end()) {
        return std::nullopt;
    }
    return it->second;
}

Taxonomy Taxonomy::defaults() {
    return Taxonomy{SynonymTable::defaults(), SpecificityTable::defaults()};
}

Taxonomy Taxonomy::load(const std::filesystem::path& config_path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(config_path));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("taxonomy config " + config_path.string() + ": " + e.what());
    }
    Taxonomy taxonomy = defaults();
    if (doc.contains("synonyms")) {
        for (const auto& [alias, value] : doc.at("synonyms").items()) {
            auto family = family_from_display(value.get<std::string>());
            if (!family) {
                throw ConfigError("taxonomy config: synonym '" + alias +
                                  "' maps to unknown family '" + value.get<std::string>() + "'");
            }
            taxonomy.synonyms.add(alias, *family);
        }
    }
    if (doc.contains("specificity")) {
        std::map<FamilyLabel, int> ranks;
        for (const auto& [name, value] : doc.at("specificity").items()) {
            auto family = family_from_display(name);
            if (!family) {
                throw ConfigError("taxonomy config: specificity entry for unknown family '" +
                                  name + "'");
            }
            ranks[*family] = value.get<int>();
        }
        taxonomy.specificity = SpecificityTable::from_ranks(ranks);
    }
    return taxonomy;
}

std::uint64_t Taxonomy::content_hash() const {
    std::uint64_t h = fnv1a64("taxonomy");
    for (const auto& [alias, family] : synonyms.entries()) {
        h = fnv1a64(alias, h);
        h = fnv1a64(display_name(family), h);
    }
    for (FamilyLabel family : all_families()) {
        h = fnv1a64(std::to_string(specificity.rank(family)), h);
    }
    return h;
}

}  // namespace malfam
