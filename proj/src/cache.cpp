#include "malfam/cache.hpp"

#include <algorithm>
#include <fstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "malfam/errors.hpp"
#include "malfam/util.hpp"

namespace malfam {

namespace {

nlohmann::json key_json(const CacheKey& key) {
    return nlohmann::json{
        {"sample_id", key.sample_id},
        {"model_id", key.model_id},
        {"prompt_id", key.prompt_id},
    };
}

CacheKey key_from_json(const nlohmann::json& doc) {
    return CacheKey{
        doc.at("sample_id").get<std::string>(),
        doc.at("model_id").get<std::string>(),
        doc.at("prompt_id").get<std::string>(),
    };
}

std::uint64_t key_hash(const CacheKey& key) {
    // \x1f separators keep ("a","bc") and ("ab","c") apart.
    std::uint64_t h = fnv1a64(key.sample_id);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(key.model_id, h);
    h = fnv1a64("\x1f", h);
    h = fnv1a64(key.prompt_id, h);
    return h;
}

}  // namespace

bool CacheKey::operator<(const CacheKey& other) const {
    return std::tie(sample_id, model_id, prompt_id) <
           std::tie(other.sample_id, other.model_id, other.prompt_id);
}

std::string CacheKey::describe() const {
    return "(sample=" + sample_id + ", model=" + model_id + ", prompt=" + prompt_id + ")";
}

ResponseCache::ResponseCache(std::filesystem::path directory)
    : directory_(std::move(directory)) {
    std::filesystem::create_directories(directory_);
}

std::filesystem::path ResponseCache::entry_path(const CacheKey& key,
                                                std::uint32_t probe) const {
    std::string hex = to_hex(key_hash(key));
    std::string name = hex;
    if (probe > 0) {
        name += "-" + std::to_string(probe);
    }
    return directory_ / hex.substr(0, 2) / (name + ".json");
}

std::optional<std::filesystem::path> ResponseCache::find_entry(const CacheKey& key) const {
    for (std::uint32_t probe = 0;; ++probe) {
        std::filesystem::path path = entry_path(key, probe);
        if (!std::filesystem::exists(path)) {
            return std::nullopt;
        }
        nlohmann::json doc = nlohmann::json::parse(read_file(path));
        if (key_from_json(doc.at("key")) == key) {
            return path;
        }
        // hash collision; keep probing
    }
}

bool ResponseCache::contains(const CacheKey& key) const {
    return find_entry(key).has_value();
}

std::optional<CacheEntry> ResponseCache::lookup(const CacheKey& key) const {
    auto path = find_entry(key);
    if (!path) {
        return std::nullopt;
    }
    nlohmann::json doc = nlohmann::json::parse(read_file(*path));
    CacheEntry entry;
    entry.response_text = doc.at("response_text").get<std::string>();
    entry.endpoint = doc.value("endpoint", "");
    entry.status = doc.value("status", 0);
    entry.latency_ms = doc.value("latency_ms", 0.0);
    return entry;
}

void ResponseCache::store(const CacheKey& key, const CacheEntry& entry) {
    std::lock_guard<std::mutex> lock(write_mutex_);

    std::filesystem::path target;
    bool is_new = true;
    for (std::uint32_t probe = 0;; ++probe) {
        std::filesystem::path path = entry_path(key, probe);
        if (!std::filesystem::exists(path)) {
            target = path;
            break;
        }
        nlohmann::json existing = nlohmann::json::parse(read_file(path));
        if (key_from_json(existing.at("key")) == key) {
            target = path;
            is_new = false;
            break;
        }
    }

    nlohmann::json doc{
        {"key", key_json(key)},
        {"response_text", entry.response_text},
        {"endpoint", entry.endpoint},
        {"status", entry.status},
        {"latency_ms", entry.latency_ms},
    };
    atomic_write_file(target, doc.dump(2) + "\n");

    if (is_new) {
        nlohmann::json line = key_json(key);
        line["file"] = std::filesystem::relative(target, directory_).generic_string();
        std::ofstream manifest(directory_ / "manifest.jsonl", std::ios::app);
        if (!manifest) {
            throw ProviderError("cannot append cache manifest in " + directory_.string());
        }
        manifest << line.dump() << '\n';
    }
}

std::vector<CacheKey> ResponseCache::keys() const {
    std::vector<CacheKey> out;
    std::filesystem::path manifest = directory_ / "manifest.jsonl";
    if (!std::filesystem::exists(manifest)) {
        return out;
    }
    for (const std::string& line : split_lines(read_file(manifest))) {
        if (trim(line).empty()) {
            continue;
        }
        out.push_back(key_from_json(nlohmann::json::parse(line)));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string ResponseCache::snapshot_id() const {
    std::uint64_t h = fnv1a64("cache-snapshot");
    for (const CacheKey& key : keys()) {
        h = fnv1a64(key.sample_id, h);
        h = fnv1a64(key.model_id, h);
        h = fnv1a64(key.prompt_id, h);
    }
    return to_hex(h);
}

}  // namespace malfam
