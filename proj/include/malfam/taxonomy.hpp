#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace malfam {

/// The ten canonical malware families. The set is closed: every label the
/// pipeline emits is one of these values.
enum class FamilyLabel : std::uint8_t {
    Trojan = 0,
    Worm,
    Virus,
    Ransomware,
    BackdoorRat,
    Dropper,
    Downloader,
    PackedObfuscated,
    SpywareInfostealer,
    BotBotnetClient,
};

inline constexpr std::size_t kFamilyCount = 10;

const std::array<FamilyLabel, kFamilyCount>& all_families();

/// Canonical display string, e.g. "Backdoor / Remote Access Trojan".
std::string_view display_name(FamilyLabel family);

std::optional<FamilyLabel> family_from_display(std::string_view display);

/// Coarse behavior groups; every family belongs to exactly one.
enum class BehaviorGroup : std::uint8_t {
    TrojanLike = 0,
    Installer,
    SelfReplicating,
    Ransomware,
    Obfuscated,
};

inline constexpr std::size_t kGroupCount = 5;

const std::array<BehaviorGroup, kGroupCount>& all_groups();

std::string_view display_name(BehaviorGroup group);

BehaviorGroup behavior_group_of(FamilyLabel family);

/// Strict total order over families used for tie resolution; lower rank wins.
/// Any table must keep Backdoor/RAT ahead of Trojan and Downloader ahead of
/// Dropper.
class SpecificityTable {
public:
    static const SpecificityTable& defaults();

    /// Validates totality, distinctness, and the two mandatory orderings;
    /// throws ConfigError otherwise.
    static SpecificityTable from_ranks(const std::map<FamilyLabel, int>& ranks);

    int rank(FamilyLabel family) const;

    /// Unique arg-min of rank over a nonempty candidate set.
    FamilyLabel most_specific(const std::vector<FamilyLabel>& candidates) const;

private:
    std::array<int, kFamilyCount> ranks_{};
};

/// Lowercase alias -> canonical family. Canonical display strings
/// (lowercased) always map to themselves.
class SynonymTable {
public:
    static const SynonymTable& defaults();

    /// Alias is lowercased and whitespace-collapsed before insertion.
    /// Remapping an existing alias to a different family throws ConfigError.
    void add(std::string_view alias, FamilyLabel family);

    std::optional<FamilyLabel> lookup(std::string_view alias_lowercase) const;

    const std::map<std::string, FamilyLabel>& entries() const { return entries_; }

private:
    std::map<std::string, FamilyLabel> entries_;
};

/// Synonyms plus specificity ranks, immutable after load.
struct Taxonomy {
    SynonymTable synonyms;
    SpecificityTable specificity;

    static Taxonomy defaults();

    /// Defaults extended/overridden by a JSON config file:
    ///   {"synonyms": {"alias": "Canonical Display", ...},
    ///    "specificity": {"Canonical Display": rank, ...}}
    /// Validated against the invariants above; throws ConfigError.
    static Taxonomy load(const std::filesystem::path& config_path);

    /// Content digest recorded in run manifests.
    std::uint64_t content_hash() const;
};

}  // namespace malfam
