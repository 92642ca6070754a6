#include "malfam/provider.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "malfam/errors.hpp"

namespace malfam {

namespace {

struct ParsedUrl {
    std::string scheme_host_port;  // httplib client target
    std::string path;
};

ParsedUrl parse_url(const std::string& url) {
    std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint '" + url + "' must be an http(s) URL");
    }
    std::size_t path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        return {url, "/"};
    }
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

ChatOutcome ChatOutcome::success(std::string text, int status) {
    ChatOutcome o;
    o.ok = true;
    o.text = std::move(text);
    o.status = status;
    return o;
}

ChatOutcome ChatOutcome::failure(std::string error, int status, bool retryable) {
    ChatOutcome o;
    o.error = std::move(error);
    o.status = status;
    o.retryable = retryable;
    return o;
}

ChatOutcome HttpChatProvider::complete(const JudgeConfig& judge, const std::string& prompt) {
    ParsedUrl url = parse_url(judge.endpoint);

    httplib::Client client(url.scheme_host_port);
    client.set_connection_timeout(judge.timeout_ms / 1000, (judge.timeout_ms % 1000) * 1000);
    client.set_read_timeout(judge.timeout_ms / 1000, (judge.timeout_ms % 1000) * 1000);

    httplib::Headers headers;
    if (!judge.auth_env.empty()) {
        const char* key = std::getenv(judge.auth_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw ConfigError("environment variable '" + judge.auth_env +
                              "' for model '" + judge.model_id + "' is not set");
        }
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    nlohmann::json request{
        {"model", judge.model_id},
        {"messages", nlohmann::json::array({nlohmann::json{{"role", "user"},
                                                           {"content", prompt}}})},
        {"temperature", judge.temperature},
    };

    httplib::Result result =
        client.Post(url.path, headers, request.dump(), "application/json");
    if (!result) {
        return ChatOutcome::failure(
            "transport error contacting " + judge.endpoint + ": " +
                httplib::to_string(result.error()),
            0, /*retryable=*/true);
    }
    if (result->status < 200 || result->status >= 300) {
        // 5xx and 429 are worth retrying; other 4xx are config problems.
        bool retryable = result->status >= 500 || result->status == 429;
        return ChatOutcome::failure("provider returned HTTP " +
                                        std::to_string(result->status) + ": " + result->body,
                                    result->status, retryable);
    }

    try {
        nlohmann::json body = nlohmann::json::parse(result->body);
        return ChatOutcome::success(
            body.at("choices").at(0).at("message").at("content").get<std::string>(),
            result->status);
    } catch (const nlohmann::json::exception& e) {
        return ChatOutcome::failure(
            std::string("malformed provider response: ") + e.what(), result->status,
            /*retryable=*/false);
    }
}

ProviderFactory default_provider_factory() {
    return [](const JudgeConfig&) { return std::make_shared<HttpChatProvider>(); };
}

}  // namespace malfam
