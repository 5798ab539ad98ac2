#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "gaar/dataset/record.hpp"
#include "gaar/error.hpp"
#include "gaar/log.hpp"
#include "gaar/pipeline/engine.hpp"
#include "json.hpp"

namespace gaar::dataset {

// One line of a batch input corpus. Only `argument` and a title are
// required; "topic" is accepted in place of "title".
struct BatchItem {
  std::size_t line = 0;
  std::string id;
  Source source = Source::kSynthetic;
  AuthorKind author_kind = AuthorKind::kHuman;
  pipeline::ArgumentInput input;
};

inline BatchItem parse_batch_item(const std::string& text, std::size_t line,
                                  Source default_source) {
  const json j = json::parse(text);
  if (!j.is_object()) throw InvalidArgument("entry is not an object");
  BatchItem item;
  item.line = line;
  item.id = j.value("id", "item-" + std::to_string(line));
  item.source = default_source;
  if (j.contains("source")) {
    const std::string tag = j.at("source").get<std::string>();
    auto s = parse_source(tag);
    if (!s) throw InvalidArgument("unknown source tag '" + tag + "'");
    item.source = *s;
  }
  const bool synthetic =
      item.source == Source::kSynthetic || item.source == Source::kSyntheticFallacious;
  item.author_kind = synthetic ? AuthorKind::kLlm : AuthorKind::kHuman;
  if (j.contains("author_kind")) {
    const std::string a = j.at("author_kind").get<std::string>();
    if (a != "human" && a != "llm") throw InvalidArgument("bad author_kind '" + a + "'");
    item.author_kind = a == "human" ? AuthorKind::kHuman : AuthorKind::kLlm;
  }
  if (j.contains("title")) {
    item.input.topic = j.at("title").get<std::string>();
  } else {
    item.input.topic = j.at("topic").get<std::string>();
  }
  if (j.contains("background") && !j.at("background").is_null()) {
    item.input.background = j.at("background").get<std::string>();
  }
  item.input.argument = j.at("argument").get<std::string>();
  item.input.validate();
  return item;
}

struct BatchOptions {
  std::size_t jobs = 1;
  // Defaults to "<out>.rejected.jsonl".
  std::optional<std::filesystem::path> sidecar;
  // When set, each run's trace is written to "<trace_dir>/<id>.json".
  std::optional<std::filesystem::path> trace_dir;
  Source default_source = Source::kSynthetic;
};

struct BatchSummary {
  std::size_t total = 0;
  std::size_t converged = 0;
  std::size_t exhausted = 0;
  std::size_t failed = 0;
  std::size_t malformed = 0;
  // Per run in input order; malformed entries have none.
  std::vector<std::string> trace_hashes;
};

inline json to_json(const BatchSummary& s) {
  return {{"total", s.total},         {"converged", s.converged}, {"exhausted", s.exhausted},
          {"failed", s.failed},       {"malformed", s.malformed},
          {"trace_hashes", s.trace_hashes}};
}

inline std::filesystem::path default_sidecar(const std::filesystem::path& out) {
  return out.string() + ".rejected.jsonl";
}

// Runs the pipeline on every entry of `corpus`. Converged runs go to `out` as
// Arguinas records; everything else goes to the sidecar with its reason.
// Output order follows input order regardless of `jobs`.
inline BatchSummary batch_reconstruct(const std::filesystem::path& corpus,
                                      const pipeline::PipelineConfig& config,
                                      llm::Backend& backend, const std::filesystem::path& out,
                                      const BatchOptions& options = {},
                                      const pipeline::Assets& assets =
                                          pipeline::Assets::defaults()) {
  config.validate();
  std::ifstream in(corpus, std::ios::binary);
  if (!in) throw DatasetError("cannot read corpus " + corpus.string());

  struct Slot {
    std::size_t line = 0;
    std::string text;
    bool done = false;
    std::optional<ArguinasRecord> record;
    json rejection;  // null when the record was written
    std::string trace_hash;
    pipeline::RunStatus status = pipeline::RunStatus::kFailed;
    bool malformed = false;
  };
  std::vector<Slot> slots;
  {
    std::string text;
    for (std::size_t line = 1; std::getline(in, text); ++line) {
      if (!text.empty() && text.back() == '\r') text.pop_back();
      if (text.find_first_not_of(" \t") == std::string::npos) continue;
      Slot s;
      s.line = line;
      s.text = std::move(text);
      slots.push_back(std::move(s));
    }
  }

  std::ofstream records_out(out, std::ios::binary | std::ios::trunc);
  if (!records_out) throw DatasetError("cannot write corpus " + out.string());
  const auto sidecar_path = options.sidecar.value_or(default_sidecar(out));
  std::ofstream sidecar_out(sidecar_path, std::ios::binary | std::ios::trunc);
  if (!sidecar_out) throw DatasetError("cannot write sidecar " + sidecar_path.string());
  if (options.trace_dir) std::filesystem::create_directories(*options.trace_dir);

  std::mutex write_mu;
  std::size_t next_to_write = 0;
  // Emits every finished slot at the head of the queue; callers hold write_mu.
  auto flush_ready = [&] {
    while (next_to_write < slots.size() && slots[next_to_write].done) {
      Slot& s = slots[next_to_write++];
      if (s.record) {
        records_out << to_json(*s.record).dump() << '\n';
      } else {
        sidecar_out << s.rejection.dump() << '\n';
      }
    }
    records_out.flush();
    sidecar_out.flush();
  };

  auto process = [&](Slot& s) {
    BatchItem item;
    try {
      item = parse_batch_item(s.text, s.line, options.default_source);
    } catch (const std::exception& e) {
      s.malformed = true;
      s.rejection = {{"line", s.line}, {"status", "Malformed"}, {"error", e.what()}};
      log::warn("corpus line " + std::to_string(s.line) + " skipped: " + e.what());
      return;
    }
    pipeline::RunResult result;
    try {
      result = pipeline::run_gaar(item.input, config, backend, assets);
    } catch (const std::exception& e) {
      // Input or config rejected before the run started.
      s.rejection = {{"line", s.line}, {"id", item.id}, {"status", "Failed"}, {"error", e.what()}};
      s.status = pipeline::RunStatus::kFailed;
      return;
    }
    s.status = result.trace.status;
    s.trace_hash = pipeline::trace_hash(result.trace);
    if (options.trace_dir) {
      std::string name = item.id;
      std::replace(name.begin(), name.end(), '/', '_');
      pipeline::write_trace(result.trace, *options.trace_dir / (name + ".json"));
    }
    if (s.status == pipeline::RunStatus::kConverged) {
      ArguinasRecord r;
      r.id = item.id;
      r.source = item.source;
      r.title = item.input.topic;
      r.background = item.input.background;
      r.argument = item.input.argument;
      r.reconstruction = result.reconstruction;
      r.fallacy = result.fallacy;
      r.author_kind = item.author_kind;
      s.record = std::move(r);
      return;
    }
    s.rejection = {{"line", s.line},
                   {"id", item.id},
                   {"status", std::string(pipeline::to_string(s.status))},
                   {"error", result.trace.error},
                   {"iterations", result.trace.iterations.size()},
                   {"trace_hash", s.trace_hash}};
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < slots.size();) {
      try {
        process(slots[i]);
      } catch (const std::exception& e) {
        slots[i].record.reset();
        slots[i].status = pipeline::RunStatus::kFailed;
        slots[i].rejection = {{"line", slots[i].line}, {"status", "Failed"}, {"error", e.what()}};
      }
      std::lock_guard lock(write_mu);
      slots[i].done = true;
      flush_ready();
    }
  };
  const std::size_t jobs =
      std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(slots.size(), 1));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }

  BatchSummary summary;
  summary.total = slots.size();
  for (const auto& s : slots) {
    if (s.malformed) {
      ++summary.malformed;
      continue;
    }
    if (!s.trace_hash.empty()) summary.trace_hashes.push_back(s.trace_hash);
    switch (s.status) {
      case pipeline::RunStatus::kConverged: ++summary.converged; break;
      case pipeline::RunStatus::kExhausted: ++summary.exhausted; break;
      case pipeline::RunStatus::kFailed: ++summary.failed; break;
    }
  }
  if (!records_out || !sidecar_out) throw DatasetError("write failed for " + out.string());
  return summary;
}

}  // namespace gaar::dataset
