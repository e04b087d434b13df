#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "geogen/errors.hpp"

namespace geogen {

// Minimal completion interface. Remote implementations may be
// nondeterministic and must tolerate concurrent calls up to their in-flight
// limit; test doubles are deterministic.
class LlmClient {
  public:
    virtual ~LlmClient() = default;
    virtual std::string complete(const std::string& prompt, double temperature) = 0;
};

struct LlmCall {
    std::string prompt;
    double temperature;
};

// Scripted client: returns canned responses in order and records every call.
class MockLlmClient : public LlmClient {
  public:
    explicit MockLlmClient(std::vector<std::string> script) : script_(std::move(script)) {}

    std::string complete(const std::string& prompt, double temperature) override;

    const std::vector<LlmCall>& calls() const { return calls_; }

  private:
    std::vector<std::string> script_;
    std::vector<LlmCall> calls_;
    std::size_t next_ = 0;
    std::mutex mu_;
};

// Adapter for ad-hoc deterministic behaviors in tests and offline stubs.
class FunctionLlmClient : public LlmClient {
  public:
    using Fn = std::function<std::string(const std::string&, double)>;
    explicit FunctionLlmClient(Fn fn) : fn_(std::move(fn)) {}

    std::string complete(const std::string& prompt, double temperature) override {
        return fn_(prompt, temperature);
    }

  private:
    Fn fn_;
};

struct HttpLlmConfig {
    std::string endpoint;  // http://host[:port][/path], chat-completion wire format
    std::string model;
    std::string api_key;            // sent as "Authorization: Bearer <key>" when set
    int timeout_seconds = 60;
    int transport_retries = 3;      // exponential backoff between attempts
    double backoff_seconds = 0.5;   // first retry delay
    int max_inflight = 4;
};

// Plain-HTTP chat-completion client. Throws TransportError after the retry
// budget; ConfigError for malformed endpoints or responses.
std::unique_ptr<LlmClient> make_http_client(const HttpLlmConfig& config);

// Reads ENDPOINT_URL / MODEL_NAME / API_KEY. Endpoint and model are
// required; a missing variable raises ConfigError.
HttpLlmConfig llm_config_from_env();

}  // namespace geogen
