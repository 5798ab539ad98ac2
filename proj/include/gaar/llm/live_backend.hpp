#pragma once

// OpenAI-compatible chat-completions client. The only header that pulls in
// cpp-httplib; link OpenSSL::SSL when using it.

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>

#include "gaar/error.hpp"
#include "gaar/llm/backend.hpp"
#include "gaar/log.hpp"
#include "httplib.h"

namespace gaar::llm {

struct RetryPolicy {
  int max_retries = 4;
  std::chrono::milliseconds base_delay{500};
  std::chrono::milliseconds max_delay{16000};
};

struct LiveConfig {
  // Base URL, e.g. "https://api.openai.com/v1"; "/chat/completions" is
  // appended.
  std::string endpoint;
  // Name of the environment variable holding the API key. The key itself is
  // read per request and never stored in this object.
  std::string credential_env;
  RetryPolicy retry;
  std::chrono::seconds timeout{300};
};

class LiveBackend : public Backend {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit LiveBackend(LiveConfig config, Sleeper sleeper = {})
      : config_(std::move(config)), sleeper_(std::move(sleeper)) {
    if (!sleeper_) {
      sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    }
    split_endpoint();
  }

  CompletionResponse complete(const CompletionRequest& request) override {
    json body = {{"model", request.model},
                 {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})},
                 {"temperature", request.decoding.temperature}};
    if (request.decoding.max_tokens) body["max_tokens"] = *request.decoding.max_tokens;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!config_.credential_env.empty()) {
      if (const char* token = std::getenv(config_.credential_env.c_str());
          token != nullptr && *token != '\0') {
        headers.emplace("Authorization", std::string("Bearer ") + token);
      }
    }

    std::string last_error;
    bool rate_limited = false;
    for (int attempt = 0; attempt <= config_.retry.max_retries; ++attempt) {
      wait_for_gate();
      httplib::Client client(origin_);
      client.set_connection_timeout(config_.timeout);
      client.set_read_timeout(config_.timeout);
      client.set_write_timeout(config_.timeout);
      const auto start = std::chrono::steady_clock::now();
      auto res = client.Post(path_, headers, payload, "application/json");
      const double latency_ms = std::chrono::duration<double, std::milli>(
                                    std::chrono::steady_clock::now() - start)
                                    .count();
      const bool last = attempt == config_.retry.max_retries;
      if (!res) {
        last_error = "transport failure: " + httplib::to_string(res.error());
        rate_limited = false;
        if (!last) backoff(attempt, std::nullopt);
        continue;
      }
      if (res->status == 200) return parse_success(res->body, latency_ms);
      if (res->status == 429) {
        last_error = "rate limited (HTTP 429)";
        rate_limited = true;
        std::optional<std::chrono::milliseconds> hint;
        if (res->has_header("Retry-After")) {
          try {
            hint = std::chrono::milliseconds(
                static_cast<long long>(std::stod(res->get_header_value("Retry-After")) * 1000));
          } catch (const std::exception&) {
          }
        }
        if (!last) backoff(attempt, hint);
        continue;
      }
      if (res->status >= 500) {
        last_error = "server error (HTTP " + std::to_string(res->status) + ")";
        rate_limited = false;
        if (!last) backoff(attempt, std::nullopt);
        continue;
      }
      throw BackendError("HTTP " + std::to_string(res->status) + ": " +
                         res->body.substr(0, 500));
    }
    const std::string msg = last_error + " after " +
                            std::to_string(config_.retry.max_retries + 1) + " attempts";
    if (rate_limited) throw RateLimited(msg);
    throw TransportError(msg);
  }

 private:
  void split_endpoint() {
    const std::string& e = config_.endpoint;
    auto scheme = e.find("://");
    if (scheme == std::string::npos) {
      throw InvalidArgument("endpoint must start with http:// or https://: " + e);
    }
    auto slash = e.find('/', scheme + 3);
    origin_ = e.substr(0, slash);
    std::string base = slash == std::string::npos ? "" : e.substr(slash);
    while (!base.empty() && base.back() == '/') base.pop_back();
    path_ = base + "/chat/completions";
  }

  static CompletionResponse parse_success(const std::string& body, double latency_ms) {
    try {
      json j = json::parse(body);
      CompletionResponse out;
      out.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
      if (j.contains("usage") && j["usage"].is_object()) {
        out.usage = Usage::from_json(j["usage"]);
      }
      out.latency_ms = latency_ms;
      return out;
    } catch (const json::exception& e) {
      throw BackendError(std::string("malformed completion response: ") + e.what());
    }
  }

  void backoff(int attempt, std::optional<std::chrono::milliseconds> hint) {
    std::chrono::milliseconds delay = config_.retry.base_delay * (1 << std::min(attempt, 20));
    if (hint && *hint > delay) delay = *hint;
    delay = std::min(delay, config_.retry.max_delay);
    std::lock_guard lock(gate_mu_);
    next_allowed_ = std::max(next_allowed_, std::chrono::steady_clock::now() + delay);
  }

  // Requests sharing this backend (and so one credential) wait out any
  // pending backoff together.
  void wait_for_gate() {
    std::chrono::steady_clock::time_point until;
    {
      std::lock_guard lock(gate_mu_);
      until = next_allowed_;
    }
    const auto now = std::chrono::steady_clock::now();
    if (until > now) {
      sleeper_(std::chrono::duration_cast<std::chrono::milliseconds>(until - now));
    }
  }

  LiveConfig config_;
  Sleeper sleeper_;
  std::string origin_;
  std::string path_;
  std::mutex gate_mu_;
  std::chrono::steady_clock::time_point next_allowed_{};
};

}  // namespace gaar::llm
