#include "geogen/llm.hpp"

#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace geogen {

std::string MockLlmClient::complete(const std::string& prompt, double temperature) {
    std::lock_guard<std::mutex> lock(mu_);
    calls_.push_back({prompt, temperature});
    if (next_ >= script_.size())
        throw TransportError("mock client: script exhausted after " +
                             std::to_string(script_.size()) + " calls");
    return script_[next_++];
}

namespace {

struct ParsedEndpoint {
    std::string host_port;  // "host:port" for httplib::Client
    std::string path;
};

ParsedEndpoint parse_endpoint(const std::string& url) {
    const std::string http = "http://";
    if (url.rfind("https://", 0) == 0)
        throw ConfigError("https endpoints are not supported by this build; "
                          "use a plain-http gateway");
    if (url.rfind(http, 0) != 0)
        throw ConfigError("endpoint must start with http://, got: " + url);
    std::string rest = url.substr(http.size());
    std::size_t slash = rest.find('/');
    ParsedEndpoint out;
    out.host_port = http + (slash == std::string::npos ? rest : rest.substr(0, slash));
    out.path = slash == std::string::npos ? "/v1/chat/completions" : rest.substr(slash);
    if (out.host_port == http) throw ConfigError("endpoint has no host: " + url);
    return out;
}

class HttpLlmClient : public LlmClient {
  public:
    explicit HttpLlmClient(HttpLlmConfig config)
        : config_(std::move(config)), endpoint_(parse_endpoint(config_.endpoint)) {
        if (config_.model.empty()) throw ConfigError("llm model name must be non-empty");
        if (config_.max_inflight < 1) throw ConfigError("max_inflight must be >= 1");
    }

    std::string complete(const std::string& prompt, double temperature) override {
        InflightSlot slot(*this);

        nlohmann::ordered_json body{
            {"model", config_.model},
            {"temperature", temperature},
            {"messages",
             nlohmann::ordered_json::array(
                 {nlohmann::ordered_json{{"role", "user"}, {"content", prompt}}})},
        };
        const std::string payload = body.dump();

        std::string last_error;
        for (int attempt = 0; attempt <= config_.transport_retries; ++attempt) {
            if (attempt > 0) {
                auto delay = std::chrono::duration<double>(
                    config_.backoff_seconds * static_cast<double>(1 << (attempt - 1)));
                std::this_thread::sleep_for(
                    std::chrono::duration_cast<std::chrono::milliseconds>(delay));
            }
            httplib::Client client(endpoint_.host_port);
            client.set_connection_timeout(config_.timeout_seconds);
            client.set_read_timeout(config_.timeout_seconds);
            httplib::Headers headers;
            if (!config_.api_key.empty())
                headers.emplace("Authorization", "Bearer " + config_.api_key);
            auto res = client.Post(endpoint_.path, headers, payload, "application/json");
            if (!res) {
                last_error = "connection failed: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status < 200 || res->status >= 300) {
                last_error = "http status " + std::to_string(res->status);
                if (res->status >= 400 && res->status < 500 && res->status != 429)
                    throw TransportError("llm endpoint rejected request: " + last_error +
                                         " body: " + res->body.substr(0, 500));
                continue;
            }
            return extract_content(res->body);
        }
        throw TransportError("llm endpoint unreachable after " +
                             std::to_string(config_.transport_retries + 1) +
                             " attempts; last error: " + last_error);
    }

  private:
    static std::string extract_content(const std::string& body) {
        nlohmann::json parsed = nlohmann::json::parse(body, nullptr, false);
        if (parsed.is_discarded())
            throw TransportError("llm endpoint returned non-JSON body");
        if (parsed.contains("choices") && parsed["choices"].is_array() &&
            !parsed["choices"].empty()) {
            const auto& choice = parsed["choices"][0];
            if (choice.contains("message") && choice["message"].contains("content"))
                return choice["message"]["content"].get<std::string>();
            if (choice.contains("text")) return choice["text"].get<std::string>();
        }
        throw TransportError("llm endpoint response missing choices[0] content");
    }

    // Counting semaphore over the configured in-flight limit.
    struct InflightSlot {
        HttpLlmClient& owner;
        explicit InflightSlot(HttpLlmClient& c) : owner(c) {
            std::unique_lock<std::mutex> lock(owner.mu_);
            owner.cv_.wait(lock, [&] { return owner.inflight_ < owner.config_.max_inflight; });
            ++owner.inflight_;
        }
        ~InflightSlot() {
            {
                std::lock_guard<std::mutex> lock(owner.mu_);
                --owner.inflight_;
            }
            owner.cv_.notify_one();
        }
    };

    HttpLlmConfig config_;
    ParsedEndpoint endpoint_;
    std::mutex mu_;
    std::condition_variable cv_;
    int inflight_ = 0;
};

}  // namespace

std::unique_ptr<LlmClient> make_http_client(const HttpLlmConfig& config) {
    return std::make_unique<HttpLlmClient>(config);
}

HttpLlmConfig llm_config_from_env() {
    HttpLlmConfig config;
    const char* endpoint = std::getenv("ENDPOINT_URL");
    const char* model = std::getenv("MODEL_NAME");
    const char* key = std::getenv("API_KEY");
    if (!endpoint || !*endpoint)
        throw ConfigError("ENDPOINT_URL is not set (required for remote LLM calls)");
    if (!model || !*model)
        throw ConfigError("MODEL_NAME is not set (required for remote LLM calls)");
    config.endpoint = endpoint;
    config.model = model;
    if (key) config.api_key = key;
    return config;
}

}  // namespace geogen
