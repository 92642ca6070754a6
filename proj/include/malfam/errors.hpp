#pragma once

#include <stdexcept>
#include <string>

namespace malfam {

// Bad flags, bad config files, unknown model ids. CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent input data (corpus, gold set, id mismatches).
// CLI exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Transport-level failure after retries were exhausted. CLI exit code 3.
class ProviderError : public std::runtime_error {
public:
    explicit ProviderError(const std::string& what) : std::runtime_error(what) {}
};

// Replay-mode lookup for a key the cache does not hold. CLI exit code 3.
class CacheMissError : public ProviderError {
public:
    explicit CacheMissError(const std::string& what) : ProviderError(what) {}
};

}  // namespace malfam
