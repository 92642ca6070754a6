#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace malfam {

/// One configured judge model.
struct JudgeConfig {
    std::string model_id;
    std::string endpoint;           // chat-completion URL, e.g. https://host/v1/chat/completions
    std::string auth_env;           // environment variable holding the API key; never a literal
    int timeout_ms = 60000;
    int max_retries = 2;
    double temperature = 0.0;       // greedy decoding keeps replay stable
    std::optional<std::size_t> max_input_chars;  // overrides the prompt default
};

/// Outcome of one provider call. `retryable` marks transport-level failures
/// worth another attempt; malformed-but-delivered responses are not retried.
struct ChatOutcome {
    bool ok = false;
    std::string text;
    int status = 0;
    std::string error;
    bool retryable = false;

    static ChatOutcome success(std::string text, int status);
    static ChatOutcome failure(std::string error, int status, bool retryable);
};

/// Minimal chat-completion contract a judge endpoint must satisfy.
class Provider {
public:
    virtual ~Provider() = default;
    virtual ChatOutcome complete(const JudgeConfig& judge, const std::string& prompt) = 0;
};

using ProviderFactory = std::function<std::shared_ptr<Provider>(const JudgeConfig&)>;

/// OpenAI-style chat-completion adapter over cpp-httplib. Sends
/// {model, messages:[{role:"user", content}], temperature} and reads
/// choices[0].message.content. Credentials come from the environment
/// variable named in the judge config, never from files.
class HttpChatProvider : public Provider {
public:
    ChatOutcome complete(const JudgeConfig& judge, const std::string& prompt) override;
};

ProviderFactory default_provider_factory();

}  // namespace malfam
