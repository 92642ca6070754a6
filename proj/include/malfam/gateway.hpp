#pragma once

#include <string>
#include <vector>

#include "malfam/cache.hpp"
#include "malfam/corpus.hpp"
#include "malfam/prompt.hpp"
#include "malfam/provider.hpp"

namespace malfam {

enum class CallMode : std::uint8_t {
    Record = 0,  // fill cache misses from the endpoint, reuse hits
    Replay,      // cache only; a miss is an error, never a network call
    Live,        // always call, never touch the cache
};

std::string_view to_string(CallMode mode);
std::optional<CallMode> call_mode_from_string(std::string_view text);

/// One classification result. Failed calls are carried as error records with
/// ok = false rather than dropped.
struct RawResponse {
    std::string sample_id;
    std::string model_id;
    std::string prompt_id;
    std::string response_text;
    double latency_ms = 0.0;
    bool retrieved_from_cache = false;
    bool ok = true;
    std::string error;
};

struct GatewayOptions {
    int per_provider_limit = 4;  // in-flight bound per endpoint
    int global_limit = 8;        // in-flight bound across all endpoints
    int backoff_base_ms = 250;   // doubled per retry; 0 disables sleeping
    ProviderFactory provider_factory;  // defaults to the HTTPS adapter
};

struct ClassifyTask {
    std::string sample_id;
    std::string prompt_id;
    std::string prompt_text;
};

/// Single classification call with retry/backoff on retryable transport
/// failures. Replay mode throws CacheMissError naming the missing key;
/// exhausted retries throw ProviderError.
RawResponse classify(Provider& provider, const JudgeConfig& judge, const ClassifyTask& task,
                     ResponseCache* cache, CallMode mode,
                     const GatewayOptions& options = {});

/// Fans |judges| x |samples| calls out over a bounded worker pool. Always
/// returns exactly |judges| x |samples| records, in (judge, sample) input
/// order regardless of completion order; per-entry failures become error
/// records and never abort the batch.
std::vector<RawResponse> batch_classify(const std::vector<JudgeConfig>& judges,
                                        const std::vector<SampleRecord>& samples,
                                        const PromptTemplate& prompt, ResponseCache* cache,
                                        CallMode mode, const GatewayOptions& options = {});

}  // namespace malfam
