#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "gaar/error.hpp"
#include "gaar/hash.hpp"
#include "gaar/pipeline/types.hpp"
#include "json.hpp"

namespace gaar::pipeline {

enum class StageId {
  kFallacyDetection = 1,
  kReconstruction = 2,
  kFormalization = 3,
  kValidity = 4,
  kStreamlining = 5,
  kFaithfulness = 6,
};

inline std::string_view to_string(StageId s) {
  switch (s) {
    case StageId::kFallacyDetection: return "fallacy_detection";
    case StageId::kReconstruction: return "reconstruction";
    case StageId::kFormalization: return "formalization";
    case StageId::kValidity: return "validity";
    case StageId::kStreamlining: return "streamlining";
    case StageId::kFaithfulness: return "faithfulness";
  }
  return "?";
}

// One backend exchange. A reprompt after a format error is a second attempt
// of the same stage.
struct Attempt {
  std::string template_name;
  std::string prompt_hash;
  std::string prompt;
  std::string response;
  std::string error;  // why the response was rejected, empty if accepted
};

struct StageRecord {
  StageId stage = StageId::kFallacyDetection;
  std::vector<Attempt> attempts;  // empty for the solver stage
  json parsed;
  json verdict;
  std::vector<Feedback> feedback;
};

struct IterationRecord {
  std::size_t index = 0;  // 1-based
  std::vector<StageRecord> stages;
  // Stage-1 re-run after this iteration when the revision threshold was hit.
  std::optional<StageRecord> revision;
  bool converged = false;
  // Failed faithfulness criteria; iterations stopped before the judge count
  // one more than the number of enabled criteria.
  std::size_t failed_criteria = 0;

  const StageRecord* find(StageId id) const {
    for (const auto& s : stages) {
      if (s.stage == id) return &s;
    }
    return nullptr;
  }
};

enum class RunStatus { kConverged, kExhausted, kFailed };

inline std::string_view to_string(RunStatus s) {
  switch (s) {
    case RunStatus::kConverged: return "Converged";
    case RunStatus::kExhausted: return "Exhausted";
    case RunStatus::kFailed: return "Failed";
  }
  return "?";
}

struct PipelineTrace {
  ArgumentInput input;
  std::optional<StageRecord> fallacy_detection;
  std::vector<IterationRecord> iterations;
  RunStatus status = RunStatus::kFailed;
  // Iteration whose result was returned.
  std::optional<std::size_t> selected_iteration;
  std::string error;  // set when status is Failed

  std::size_t llm_calls() const {
    std::size_t n = fallacy_detection ? fallacy_detection->attempts.size() : 0;
    for (const auto& it : iterations) {
      for (const auto& s : it.stages) n += s.attempts.size();
      if (it.revision) n += it.revision->attempts.size();
    }
    return n;
  }

  std::size_t revisions() const {
    std::size_t n = 0;
    for (const auto& it : iterations) n += it.revision ? 1 : 0;
    return n;
  }
};

inline json to_json(const Attempt& a) {
  return {{"template", a.template_name}, {"prompt_hash", a.prompt_hash},
          {"prompt", a.prompt},          {"response", a.response},
          {"error", a.error}};
}

inline json to_json(const StageRecord& s) {
  json attempts = json::array();
  for (const auto& a : s.attempts) attempts.push_back(to_json(a));
  return {{"stage", static_cast<int>(s.stage)},
          {"name", std::string(to_string(s.stage))},
          {"attempts", attempts},
          {"parsed", s.parsed},
          {"verdict", s.verdict},
          {"feedback", feedback_to_json(s.feedback)}};
}

inline json to_json(const PipelineTrace& t) {
  json iterations = json::array();
  for (const auto& it : t.iterations) {
    json stages = json::array();
    for (const auto& s : it.stages) stages.push_back(to_json(s));
    iterations.push_back({{"index", it.index},
                          {"stages", stages},
                          {"revision", it.revision ? to_json(*it.revision) : json(nullptr)},
                          {"converged", it.converged},
                          {"failed_criteria", it.failed_criteria}});
  }
  json input = {{"topic", t.input.topic},
                {"background", t.input.background ? json(*t.input.background) : json(nullptr)},
                {"argument", t.input.argument}};
  return {{"input", input},
          {"fallacy_detection",
           t.fallacy_detection ? to_json(*t.fallacy_detection) : json(nullptr)},
          {"iterations", iterations},
          {"status", std::string(to_string(t.status))},
          {"selected_iteration",
           t.selected_iteration ? json(*t.selected_iteration) : json(nullptr)},
          {"error", t.error}};
}

// SHA-256 of the canonical JSON form; equal traces hash equal.
inline std::string trace_hash(const PipelineTrace& t) { return sha256_hex(to_json(t).dump()); }

inline void write_trace(const PipelineTrace& t, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write trace " + path.string());
  out << to_json(t).dump(2) << '\n';
}

}  // namespace gaar::pipeline
