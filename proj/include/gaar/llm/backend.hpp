#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gaar/error.hpp"
#include "gaar/hash.hpp"
#include "gaar/llm/template.hpp"
#include "json.hpp"

namespace gaar::llm {

using nlohmann::json;

struct DecodingParams {
  double temperature = 0.0;
  std::optional<std::int64_t> max_tokens;

  json to_json() const {
    json j = {{"temperature", temperature}};
    if (max_tokens) j["max_tokens"] = *max_tokens;
    return j;
  }
};

struct CompletionRequest {
  std::string model;
  std::string template_name;
  Bindings bindings;
  std::string prompt;  // rendered from the template and bindings
  DecodingParams decoding;
};

struct Usage {
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;

  json to_json() const {
    return {{"prompt_tokens", prompt_tokens}, {"completion_tokens", completion_tokens}};
  }
  static Usage from_json(const json& j) {
    Usage u{j.value("prompt_tokens", std::int64_t{0}),
            j.value("completion_tokens", std::int64_t{0})};
    if (u.prompt_tokens < 0 || u.completion_tokens < 0) {
      throw BackendError("negative token usage");
    }
    return u;
  }
  friend bool operator==(const Usage&, const Usage&) = default;
};

struct CompletionResponse {
  std::string text;
  Usage usage;
  double latency_ms = 0.0;
};

// Cache key of a request: hash of the template name, the bindings and the
// decoding parameters. The rendered prompt text is deliberately not part of it.
inline std::string request_key(const CompletionRequest& r) {
  json j = {{"template", r.template_name},
            {"bindings", r.bindings},
            {"decoding", r.decoding.to_json()}};
  return sha256_hex(j.dump());
}

// What a cassette stores about a request. Carries no headers and no
// credentials; the prompt itself is represented by its hash.
inline json request_snapshot(const CompletionRequest& r) {
  return {{"model", r.model},
          {"template", r.template_name},
          {"bindings", r.bindings},
          {"decoding", r.decoding.to_json()},
          {"prompt_sha256", sha256_hex(r.prompt)}};
}

// Shared by every backend; implementations are safe to call from several
// threads at once.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual CompletionResponse complete(const CompletionRequest& request) = 0;
};

// Returns the given responses in order, whatever the request.
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(std::vector<std::string> responses)
      : responses_(std::move(responses)) {}

  CompletionResponse complete(const CompletionRequest&) override {
    std::lock_guard lock(mu_);
    if (cursor_ >= responses_.size()) {
      throw BackendError("scripted backend exhausted after " +
                         std::to_string(responses_.size()) + " responses");
    }
    return {responses_[cursor_++], {}, 0.0};
  }

  std::size_t calls() const {
    std::lock_guard lock(mu_);
    return cursor_;
  }

 private:
  std::vector<std::string> responses_;
  mutable std::mutex mu_;
  std::size_t cursor_ = 0;
};

// Answers through a callable; used for mocks whose reply depends on the
// request.
class FunctionBackend : public Backend {
 public:
  using Fn = std::function<std::string(const CompletionRequest&)>;
  explicit FunctionBackend(Fn fn) : fn_(std::move(fn)) {}

  CompletionResponse complete(const CompletionRequest& request) override {
    {
      std::lock_guard lock(mu_);
      ++calls_;
    }
    return {fn_(request), {}, 0.0};
  }

  std::size_t calls() const {
    std::lock_guard lock(mu_);
    return calls_;
  }

 private:
  Fn fn_;
  mutable std::mutex mu_;
  std::size_t calls_ = 0;
};

struct CassetteRecord {
  std::string key;
  json request;
  std::string response;
  Usage usage;

  json to_json() const {
    return {{"key", key}, {"request", request}, {"response", response},
            {"usage", usage.to_json()}};
  }
  static CassetteRecord from_json(const json& j) {
    return {j.at("key").get<std::string>(), j.value("request", json::object()),
            j.at("response").get<std::string>(),
            Usage::from_json(j.value("usage", json::object()))};
  }
};

inline std::vector<CassetteRecord> read_cassette(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BackendError("cannot read cassette " + path.string());
  std::vector<CassetteRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(CassetteRecord::from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw BackendError("cassette " + path.string() + " line " +
                         std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

// Replaces every occurrence of each secret with a fixed marker.
inline std::string scrub(std::string text, const std::vector<std::string>& secrets) {
  static const std::string kMarker = "[REDACTED]";
  for (const auto& s : secrets) {
    if (s.empty()) continue;
    std::size_t pos = 0;
    while ((pos = text.find(s, pos)) != std::string::npos) {
      text.replace(pos, s.size(), kMarker);
      pos += kMarker.size();
    }
  }
  return text;
}

// Serves recorded responses by request key. Repeated identical requests get
// the key's records in recorded order; anything beyond that is a CacheMiss.
class ReplayBackend : public Backend {
 public:
  explicit ReplayBackend(std::vector<CassetteRecord> records) {
    for (auto& r : records) by_key_[r.key].push_back(std::move(r));
  }
  explicit ReplayBackend(const std::filesystem::path& cassette)
      : ReplayBackend(read_cassette(cassette)) {}

  CompletionResponse complete(const CompletionRequest& request) override {
    const std::string key = request_key(request);
    std::lock_guard lock(mu_);
    auto it = by_key_.find(key);
    if (it == by_key_.end()) {
      throw CacheMiss("no cassette entry for template " + request.template_name +
                      " (key " + key.substr(0, 12) + ")");
    }
    std::size_t& cursor = cursors_[key];
    if (cursor >= it->second.size()) {
      throw CacheMiss("cassette entries for template " + request.template_name +
                      " (key " + key.substr(0, 12) + ") exhausted");
    }
    const CassetteRecord& r = it->second[cursor++];
    return {r.response, r.usage, 0.0};
  }

  void rewind() {
    std::lock_guard lock(mu_);
    cursors_.clear();
  }

 private:
  std::map<std::string, std::vector<CassetteRecord>> by_key_;
  std::map<std::string, std::size_t> cursors_;
  std::mutex mu_;
};

// Forwards to another backend and appends every exchange to a cassette file.
// `secrets` are scrubbed from each line before it is written.
class RecordingBackend : public Backend {
 public:
  RecordingBackend(Backend& inner, const std::filesystem::path& cassette,
                   std::vector<std::string> secrets = {}, bool append = false)
      : inner_(inner),
        out_(cassette, std::ios::binary | (append ? std::ios::app : std::ios::trunc)),
        secrets_(std::move(secrets)) {
    if (!out_) throw BackendError("cannot write cassette " + cassette.string());
  }

  CompletionResponse complete(const CompletionRequest& request) override {
    CompletionResponse response = inner_.complete(request);
    CassetteRecord record{request_key(request), request_snapshot(request),
                          response.text, response.usage};
    const std::string line = scrub(record.to_json().dump(), secrets_);
    std::lock_guard lock(mu_);
    out_ << line << '\n';
    out_.flush();
    return response;
  }

 private:
  Backend& inner_;
  std::ofstream out_;
  std::vector<std::string> secrets_;
  std::mutex mu_;
};

}  // namespace gaar::llm
