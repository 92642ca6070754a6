#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace malfam {

/// Unique cache identity for one provider call.
struct CacheKey {
    std::string sample_id;
    std::string model_id;
    std::string prompt_id;

    bool operator==(const CacheKey&) const = default;
    bool operator<(const CacheKey& other) const;
    std::string describe() const;
};

struct CacheEntry {
    std::string response_text;  // verbatim provider output
    std::string endpoint;
    int status = 0;
    double latency_ms = 0.0;
};

/// Append-only directory store: one JSON file per key under a two-hex-digit
/// shard, plus a manifest.jsonl index. File names derive from a stable hash
/// of the key; hash collisions fall through to probe suffixes, so distinct
/// keys never share a file. Writes are atomic and serialized; lookups are
/// plain reads.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path directory);

    const std::filesystem::path& directory() const { return directory_; }

    bool contains(const CacheKey& key) const;
    std::optional<CacheEntry> lookup(const CacheKey& key) const;

    /// Storing the same key twice keeps the latest entry; the manifest is
    /// only appended for new keys.
    void store(const CacheKey& key, const CacheEntry& entry);

    /// All keys listed in the manifest, sorted.
    std::vector<CacheKey> keys() const;

    /// Digest of the sorted manifest; recorded in run manifests so outputs
    /// can be traced to an exact cache state.
    std::string snapshot_id() const;

private:
    std::filesystem::path entry_path(const CacheKey& key, std::uint32_t probe) const;
    std::optional<std::filesystem::path> find_entry(const CacheKey& key) const;

    std::filesystem::path directory_;
    mutable std::mutex write_mutex_;
};

}  // namespace malfam
