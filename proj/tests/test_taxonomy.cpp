#include <doctest.h>

#include <filesystem>
#include <map>
#include <set>

#include "malfam/errors.hpp"
#include "malfam/taxonomy.hpp"
#include "malfam/util.hpp"

using namespace malfam;

TEST_CASE("family label space is exactly the ten canonical values") {
    CHECK(all_families().size() == 10);
    std::set<std::string_view> names;
    for (FamilyLabel f : all_families()) {
        names.insert(display_name(f));
        CHECK(family_from_display(display_name(f)) == f);
    }
    CHECK(names.size() == 10);
    CHECK(names.count("Backdoor / Remote Access Trojan") == 1);
    CHECK(names.count("Packed / Obfuscated Malware") == 1);
    CHECK(!family_from_display("Riskware").has_value());
}

TEST_CASE("behavior groups partition the families as 4+2+2+1+1") {
    std::map<BehaviorGroup, int> sizes;
    for (FamilyLabel f : all_families()) {
        ++sizes[behavior_group_of(f)];
    }
    CHECK(sizes.size() == 5);
    CHECK(sizes[BehaviorGroup::TrojanLike] == 4);
    CHECK(sizes[BehaviorGroup::Installer] == 2);
    CHECK(sizes[BehaviorGroup::SelfReplicating] == 2);
    CHECK(sizes[BehaviorGroup::Ransomware] == 1);
    CHECK(sizes[BehaviorGroup::Obfuscated] == 1);

    CHECK(behavior_group_of(FamilyLabel::Trojan) == BehaviorGroup::TrojanLike);
    CHECK(behavior_group_of(FamilyLabel::BackdoorRat) == BehaviorGroup::TrojanLike);
    CHECK(behavior_group_of(FamilyLabel::SpywareInfostealer) == BehaviorGroup::TrojanLike);
    CHECK(behavior_group_of(FamilyLabel::BotBotnetClient) == BehaviorGroup::TrojanLike);
    CHECK(behavior_group_of(FamilyLabel::Dropper) == BehaviorGroup::Installer);
    CHECK(behavior_group_of(FamilyLabel::Downloader) == BehaviorGroup::Installer);
    CHECK(behavior_group_of(FamilyLabel::Worm) == BehaviorGroup::SelfReplicating);
    CHECK(behavior_group_of(FamilyLabel::Virus) == BehaviorGroup::SelfReplicating);
    CHECK(behavior_group_of(FamilyLabel::Ransomware) == BehaviorGroup::Ransomware);
    CHECK(behavior_group_of(FamilyLabel::PackedObfuscated) == BehaviorGroup::Obfuscated);
}

TEST_CASE("default specificity table satisfies the mandatory orderings") {
    const SpecificityTable& table = SpecificityTable::defaults();
    CHECK(table.rank(FamilyLabel::BackdoorRat) < table.rank(FamilyLabel::Trojan));
    CHECK(table.rank(FamilyLabel::Downloader) < table.rank(FamilyLabel::Dropper));

    std::set<int> ranks;
    for (FamilyLabel f : all_families()) {
        ranks.insert(table.rank(f));
        CHECK(table.rank(f) == table.rank(f));  // pure
    }
    CHECK(ranks.size() == 10);  // strict total order: arg-min is unique

    CHECK(table.most_specific({FamilyLabel::Trojan, FamilyLabel::BackdoorRat}) ==
          FamilyLabel::BackdoorRat);
    CHECK(table.most_specific({FamilyLabel::Dropper, FamilyLabel::Downloader}) ==
          FamilyLabel::Downloader);
    CHECK(table.most_specific({FamilyLabel::Worm, FamilyLabel::Ransomware}) ==
          FamilyLabel::Ransomware);
}

TEST_CASE("specificity table validation rejects bad configurations") {
    std::map<FamilyLabel, int> ranks;
    int next = 1;
    for (FamilyLabel f : all_families()) {
        ranks[f] = next++;
    }
    // enum order puts Trojan first, so Backdoor/RAT would rank behind it
    CHECK_THROWS_AS(SpecificityTable::from_ranks(ranks), ConfigError);

    std::map<FamilyLabel, int> partial = ranks;
    partial.erase(FamilyLabel::Virus);
    CHECK_THROWS_AS(SpecificityTable::from_ranks(partial), ConfigError);

    std::map<FamilyLabel, int> duplicate = ranks;
    duplicate[FamilyLabel::Trojan] = duplicate[FamilyLabel::Worm];
    CHECK_THROWS_AS(SpecificityTable::from_ranks(duplicate), ConfigError);
}

TEST_CASE("synonym lookup is idempotent over canonical strings") {
    const SynonymTable& table = SynonymTable::defaults();
    for (FamilyLabel f : all_families()) {
        std::string key = lowercase_ascii(display_name(f));
        auto mapped = table.lookup(key);
        REQUIRE(mapped.has_value());
        CHECK(*mapped == f);
        // looking up the display string of the mapped family again
        CHECK(table.lookup(lowercase_ascii(display_name(*mapped))) == *mapped);
    }
    CHECK(table.lookup("rat") == FamilyLabel::BackdoorRat);
    CHECK(table.lookup("keylogger") == FamilyLabel::SpywareInfostealer);
    CHECK(!table.lookup("riskware").has_value());
}

TEST_CASE("synonym table rejects conflicting aliases") {
    SynonymTable table = SynonymTable::defaults();
    CHECK_THROWS_AS(table.add("rat", FamilyLabel::Trojan), ConfigError);
    CHECK_NOTHROW(table.add("rat", FamilyLabel::BackdoorRat));  // same mapping is fine
}

TEST_CASE("taxonomy override file extends synonyms and replaces ranks") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "malfam_taxonomy_test";
    fs::create_directories(dir);
    fs::path file = dir / "taxonomy.json";

    atomic_write_file(file, R"({
      "synonyms": {"crypto locker": "Ransomware"},
      "specificity": {
        "Ransomware": 1, "Bot / Botnet Client": 2, "Spyware / Infostealer": 3,
        "Backdoor / Remote Access Trojan": 4, "Downloader": 5, "Dropper": 6,
        "Worm": 8, "Virus": 7, "Packed / Obfuscated Malware": 9, "Trojan": 10
      }
    })");
    Taxonomy taxonomy = Taxonomy::load(file);
    CHECK(taxonomy.synonyms.lookup("crypto locker") == FamilyLabel::Ransomware);
    CHECK(taxonomy.synonyms.lookup("rat") == FamilyLabel::BackdoorRat);  // defaults kept
    CHECK(taxonomy.specificity.rank(FamilyLabel::Virus) == 7);
    CHECK(taxonomy.content_hash() != Taxonomy::defaults().content_hash());

    atomic_write_file(file, R"({"synonyms": {"thing": "NotAFamily"}})");
    CHECK_THROWS_AS(Taxonomy::load(file), ConfigError);

    atomic_write_file(file, R"({"specificity": {"Trojan": 1}})");
    CHECK_THROWS_AS(Taxonomy::load(file), ConfigError);
    fs::remove_all(dir);
}
