#include "malfam/gateway.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include "malfam/errors.hpp"

namespace malfam {

namespace {

class Semaphore {
public:
    explicit Semaphore(int count) : count_(count) {}

    void acquire() {
        std::unique_lock<std::mutex> lock(mutex_);
        cv_.wait(lock, [this] { return count_ > 0; });
        --count_;
    }

    void release() {
        {
            std::lock_guard<std::mutex> lock(mutex_);
            ++count_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mutex_;
    std::condition_variable cv_;
    int count_;
};

struct SemaphoreGuard {
    explicit SemaphoreGuard(Semaphore& s) : sem(s) { sem.acquire(); }
    ~SemaphoreGuard() { sem.release(); }
    Semaphore& sem;
};

double elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     start)
        .count();
}

RawResponse from_cache_entry(const CacheKey& key, const CacheEntry& entry) {
    RawResponse r;
    r.sample_id = key.sample_id;
    r.model_id = key.model_id;
    r.prompt_id = key.prompt_id;
    r.response_text = entry.response_text;
    r.latency_ms = entry.latency_ms;
    r.retrieved_from_cache = true;
    return r;
}

}  // namespace

std::string_view to_string(CallMode mode) {
    switch (mode) {
        case CallMode::Record: return "record";
        case CallMode::Replay: return "replay";
        case CallMode::Live: return "live";
    }
    return "replay";
}

std::optional<CallMode> call_mode_from_string(std::string_view text) {
    if (text == "record") return CallMode::Record;
    if (text == "replay") return CallMode::Replay;
    if (text == "live") return CallMode::Live;
    return std::nullopt;
}

RawResponse classify(Provider& provider, const JudgeConfig& judge, const ClassifyTask& task,
                     ResponseCache* cache, CallMode mode, const GatewayOptions& options) {
    const CacheKey key{task.sample_id, judge.model_id, task.prompt_id};

    if (mode != CallMode::Live) {
        if (cache == nullptr) {
            throw ConfigError("cache required in " + std::string(to_string(mode)) + " mode");
        }
        if (auto entry = cache->lookup(key)) {
            return from_cache_entry(key, *entry);
        }
        if (mode == CallMode::Replay) {
            throw CacheMissError("replay miss for key " + key.describe());
        }
    }

    ChatOutcome outcome;
    double latency = 0.0;
    const int attempts = 1 + std::max(0, judge.max_retries);
    for (int attempt = 0; attempt < attempts; ++attempt) {
        if (attempt > 0 && options.backoff_base_ms > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(options.backoff_base_ms << (attempt - 1)));
        }
        auto start = std::chrono::steady_clock::now();
        outcome = provider.complete(judge, task.prompt_text);
        latency = elapsed_ms(start);
        if (outcome.ok || !outcome.retryable) {
            break;
        }
    }

    if (!outcome.ok) {
        throw ProviderError("model '" + judge.model_id + "' failed for key " +
                            key.describe() + ": " + outcome.error);
    }

    RawResponse r;
    r.sample_id = task.sample_id;
    r.model_id = judge.model_id;
    r.prompt_id = task.prompt_id;
    r.response_text = outcome.text;
    r.latency_ms = latency;

    if (mode == CallMode::Record) {
        CacheEntry entry;
        entry.response_text = outcome.text;
        entry.endpoint = judge.endpoint;
        entry.status = outcome.status;
        entry.latency_ms = latency;
        cache->store(key, entry);
    }
    return r;
}

std::vector<RawResponse> batch_classify(const std::vector<JudgeConfig>& judges,
                                        const std::vector<SampleRecord>& samples,
                                        const PromptTemplate& prompt, ResponseCache* cache,
                                        CallMode mode, const GatewayOptions& options) {
    prompt.validate();

    GatewayOptions opts = options;
    if (!opts.provider_factory) {
        opts.provider_factory = default_provider_factory();
    }

    struct Task {
        const JudgeConfig* judge;
        std::shared_ptr<Provider> provider;
        Semaphore* endpoint_limit;
        ClassifyTask call;
        std::size_t slot;
    };

    // One provider instance and one in-flight bound per endpoint; judges
    // sharing an endpoint share both.
    std::map<std::string, std::shared_ptr<Provider>> providers;
    std::map<std::string, std::unique_ptr<Semaphore>> endpoint_limits;
    for (const JudgeConfig& judge : judges) {
        if (!providers.count(judge.endpoint)) {
            providers[judge.endpoint] = opts.provider_factory(judge);
            endpoint_limits[judge.endpoint] =
                std::make_unique<Semaphore>(std::max(1, opts.per_provider_limit));
        }
    }

    std::vector<Task> tasks;
    tasks.reserve(judges.size() * samples.size());
    for (const JudgeConfig& judge : judges) {
        PromptTemplate effective = prompt;
        if (judge.max_input_chars) {
            effective.max_input_chars = *judge.max_input_chars;
        }
        for (const SampleRecord& sample : samples) {
            tasks.push_back(Task{
                &judge,
                providers.at(judge.endpoint),
                endpoint_limits.at(judge.endpoint).get(),
                ClassifyTask{sample.sample_id, prompt.id, render_prompt(effective, sample)},
                tasks.size(),
            });
        }
    }

    std::vector<RawResponse> results(tasks.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        while (true) {
            std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) {
                return;
            }
            Task& task = tasks[i];
            RawResponse response;
            try {
                SemaphoreGuard guard(*task.endpoint_limit);
                response = classify(*task.provider, *task.judge, task.call, cache, mode, opts);
            } catch (const std::exception& e) {
                response.sample_id = task.call.sample_id;
                response.model_id = task.judge->model_id;
                response.prompt_id = task.call.prompt_id;
                response.ok = false;
                response.error = e.what();
            }
            results[task.slot] = std::move(response);
        }
    };

    const std::size_t n_workers =
        std::min<std::size_t>(std::max(1, opts.global_limit), std::max<std::size_t>(tasks.size(), 1));
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) {
        pool.emplace_back(worker);
    }
    for (std::thread& t : pool) {
        t.join();
    }
    return results;
}

}  // namespace malfam
