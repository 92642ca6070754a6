#include "malfam/corpus.hpp"

#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "malfam/errors.hpp"
#include "malfam/normalizer.hpp"
#include "malfam/util.hpp"

namespace malfam {

namespace {

void append_error(std::string& report, std::size_t line_no, const std::string& message) {
    if (!report.empty()) {
        report += '\n';
    }
    report += "  line " + std::to_string(line_no) + ": " + message;
}

}  // namespace

std::vector<SampleRecord> load_samples(const std::filesystem::path& path) {
    const std::string content = read_file(path);
    std::vector<SampleRecord> samples;
    std::map<std::string, std::size_t> first_line_of_id;
    std::string errors;

    std::size_t line_no = 0;
    for (const std::string& line : split_lines(content)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
            SampleRecord record;
            record.sample_id = doc.at("id").get<std::string>();
            record.source_code = doc.at("source").get<std::string>();
            record.api_imports = doc.at("imports").get<std::vector<std::string>>();

            if (record.sample_id.empty()) {
                append_error(errors, line_no, "empty sample id");
                continue;
            }
            if (record.source_code.empty() && record.api_imports.empty()) {
                append_error(errors, line_no,
                             "record '" + record.sample_id +
                                 "' has neither source code nor imports");
                continue;
            }
            auto [it, inserted] = first_line_of_id.emplace(record.sample_id, line_no);
            if (!inserted) {
                append_error(errors, line_no,
                             "duplicate id '" + record.sample_id + "' (first seen on line " +
                                 std::to_string(it->second) + ")");
                continue;
            }
            samples.push_back(std::move(record));
        } catch (const nlohmann::json::exception& e) {
            append_error(errors, line_no, e.what());
        }
    }

    if (!errors.empty()) {
        throw DataError("invalid sample file " + path.string() + ":\n" + errors);
    }
    return samples;
}

void save_samples(const std::filesystem::path& path,
                  const std::vector<SampleRecord>& samples) {
    std::string out;
    for (const SampleRecord& record : samples) {
        nlohmann::json doc{
            {"id", record.sample_id},
            {"source", record.source_code},
            {"imports", record.api_imports},
        };
        out += doc.dump();
        out += '\n';
    }
    atomic_write_file(path, out);
}

std::vector<GoldRecord> load_gold(const std::filesystem::path& path,
                                  const SynonymTable& synonyms) {
    const std::string content = read_file(path);
    std::vector<std::string> lines = split_lines(content);
    if (lines.empty() || collapse_whitespace(lowercase_ascii(lines.front())) !=
                             "sample_id,label") {
        throw DataError("gold file " + path.string() +
                        ": expected header 'sample_id,label'");
    }

    std::vector<GoldRecord> gold;
    std::map<std::string, std::size_t> first_line_of_id;
    std::string errors;

    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const std::string& line = lines[i];
        if (trim(line).empty()) {
            continue;
        }
        std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            append_error(errors, line_no, "expected 'sample_id,label'");
            continue;
        }
        std::string sample_id = trim(line.substr(0, comma));
        std::string raw_label = trim(line.substr(comma + 1));
        if (sample_id.empty()) {
            append_error(errors, line_no, "empty sample id");
            continue;
        }
        NormalizedPrediction normalized = normalize_strict(raw_label, synonyms);
        if (!normalized.valid()) {
            append_error(errors, line_no,
                         "label '" + raw_label + "' is not a canonical family or synonym");
            continue;
        }
        auto [it, inserted] = first_line_of_id.emplace(sample_id, line_no);
        if (!inserted) {
            append_error(errors, line_no,
                         "duplicate sample id '" + sample_id + "' (first seen on line " +
                             std::to_string(it->second) + ")");
            continue;
        }
        gold.push_back({std::move(sample_id), *normalized.label});
    }

    if (!errors.empty()) {
        throw DataError("invalid gold file " + path.string() + ":\n" + errors);
    }
    return gold;
}

void save_gold(const std::filesystem::path& path, const std::vector<GoldRecord>& gold) {
    std::string out = "sample_id,label\n";
    for (const GoldRecord& record : gold) {
        out += record.sample_id;
        out += ',';
        out += display_name(record.label);
        out += '\n';
    }
    atomic_write_file(path, out);
}

std::map<FamilyLabel, std::size_t> gold_distribution(const std::vector<GoldRecord>& gold) {
    std::map<FamilyLabel, std::size_t> distribution;
    for (FamilyLabel f : all_families()) {
        distribution[f] = 0;
    }
    for (const GoldRecord& record : gold) {
        ++distribution[record.label];
    }
    return distribution;
}

std::string render_gold_distribution(const std::map<FamilyLabel, std::size_t>& distribution) {
    std::size_t total = 0;
    std::ostringstream out;
    out << "Gold set distribution:\n";
    for (FamilyLabel f : all_families()) {
        std::size_t count = distribution.count(f) ? distribution.at(f) : 0;
        total += count;
        out << "  " << std::left << std::setw(34) << display_name(f) << std::right
            << std::setw(5) << count << '\n';
    }
    out << "  " << std::left << std::setw(34) << "Total" << std::right << std::setw(5)
        << total << '\n';
    return out.str();
}

}  // namespace malfam
