#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "malfam/calibration.hpp"
#include "malfam/taxonomy.hpp"

namespace malfam {

/// One input sample: static source text plus the detected API import list.
struct SampleRecord {
    std::string sample_id;
    std::string source_code;
    std::vector<std::string> api_imports;

    bool operator==(const SampleRecord&) const = default;
};

/// Line-delimited JSON, one object per line with fields id, source, imports.
/// Every malformed line, duplicate id, and empty-content record is collected
/// into a single DataError naming the offending line numbers.
std::vector<SampleRecord> load_samples(const std::filesystem::path& path);

void save_samples(const std::filesystem::path& path,
                  const std::vector<SampleRecord>& samples);

/// Comma-delimited text with header "sample_id,label". Labels pass through
/// the strict normalizer (exact canonical or synonym match only); anything
/// unmappable is a DataError naming the row and the offending string.
std::vector<GoldRecord> load_gold(const std::filesystem::path& path,
                                  const SynonymTable& synonyms);

void save_gold(const std::filesystem::path& path, const std::vector<GoldRecord>& gold);

/// Family -> sample count, zero entries included.
std::map<FamilyLabel, std::size_t> gold_distribution(const std::vector<GoldRecord>& gold);

std::string render_gold_distribution(const std::map<FamilyLabel, std::size_t>& distribution);

}  // namespace malfam
