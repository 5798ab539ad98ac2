#pragma once

#include <cctype>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gaar/error.hpp"
#include "gaar/fol/formula.hpp"
#include "gaar/fol/keys.hpp"
#include "gaar/fol/render.hpp"
#include "gaar/solver/validity.hpp"
#include "json.hpp"

namespace gaar::pipeline {

using nlohmann::json;

struct ArgumentInput {
  std::string topic;
  std::optional<std::string> background;
  std::string argument;

  void validate() const {
    if (topic.empty()) throw InvalidArgument("argument input has an empty topic");
    if (argument.empty()) throw InvalidArgument("argument input has an empty argument");
  }
  friend bool operator==(const ArgumentInput&, const ArgumentInput&) = default;
};

struct NamedFallacy {
  std::string name;
  std::string rationale;
  friend bool operator==(const NamedFallacy&, const NamedFallacy&) = default;
};

struct FallacyReport {
  std::optional<NamedFallacy> formal;
  std::vector<NamedFallacy> informal;

  bool none_detected() const { return !formal && informal.empty(); }
  bool has_formal() const { return formal.has_value(); }
  friend bool operator==(const FallacyReport&, const FallacyReport&) = default;
};

struct Premise {
  std::string label;
  std::string text;
  bool implicit = false;
  friend bool operator==(const Premise&, const Premise&) = default;
};

struct Reconstruction {
  std::vector<Premise> premises;
  std::vector<std::string> intermediate_conclusions;
  std::string conclusion;
  std::string connections;

  // Labels must run P1, P2, ... unless `allow_gaps` (streamlined output after
  // pruning keeps the surviving labels).
  void validate(bool allow_gaps = false) const {
    if (premises.empty()) throw InvalidArgument("reconstruction has no premises");
    if (conclusion.empty()) throw InvalidArgument("reconstruction has no conclusion");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < premises.size(); ++i) {
      const Premise& p = premises[i];
      if (p.text.empty()) throw InvalidArgument("premise " + p.label + " is empty");
      if (!allow_gaps && p.label != "P" + std::to_string(i + 1)) {
        throw InvalidArgument("premise labels must run P1..Pn; found " + p.label);
      }
      if (!seen.insert(p.label).second) {
        throw InvalidArgument("duplicate premise label " + p.label);
      }
    }
  }
  friend bool operator==(const Reconstruction&, const Reconstruction&) = default;
};

struct Formalization {
  fol::SymbolKeys keys;
  solver::LabeledPremises premises;
  fol::Formula conclusion;
  // Premises the formalizer reported as missing from the reconstruction.
  // Never added to `premises`; surfaced as SolverAddition feedback.
  std::vector<fol::Formula> additions;

  friend bool operator==(const Formalization&, const Formalization&) = default;
};

enum class FeedbackKind {
  kInvalidity,
  kAccuracy,
  kCompleteness,
  kParsimony,
  kFaithfulness,  // coarse-mode judge verdict
  kFallacyRevision,
  kSolverAddition,
};

struct Feedback {
  FeedbackKind kind;
  std::string message;
  friend bool operator==(const Feedback&, const Feedback&) = default;
};

enum class Criterion { kAccuracy, kCompleteness, kParsimony };

inline constexpr Criterion kAllCriteria[] = {
    Criterion::kAccuracy, Criterion::kCompleteness, Criterion::kParsimony};

enum class SchemeTheory { kGeneral, kSpecific };

struct PipelineConfig {
  std::size_t max_iterations = 10;
  std::size_t fallacy_revision_threshold = 3;
  std::size_t max_fallacy_revisions = 2;
  SchemeTheory scheme_theory = SchemeTheory::kGeneral;
  bool fallacy_path = true;
  bool fine_grained_faithfulness = true;
  std::set<Criterion> criteria = {Criterion::kAccuracy, Criterion::kCompleteness,
                                  Criterion::kParsimony};
  bool scheme_instruction = true;
  bool pruning = true;
  std::size_t premise_cap = 16;
  std::string model = "default";
  double temperature = 0.0;

  void validate() const {
    if (max_iterations < 1) throw InvalidArgument("max_iterations must be at least 1");
    if (fallacy_revision_threshold < 1 ||
        fallacy_revision_threshold >= max_iterations) {
      throw InvalidArgument("fallacy revision threshold must satisfy 1 <= N < max_iterations");
    }
    if (fine_grained_faithfulness && criteria.empty()) {
      throw InvalidArgument("at least one faithfulness criterion must be enabled");
    }
  }
};

inline std::string_view to_string(FeedbackKind k) {
  switch (k) {
    case FeedbackKind::kInvalidity: return "Invalidity";
    case FeedbackKind::kAccuracy: return "Accuracy";
    case FeedbackKind::kCompleteness: return "Completeness";
    case FeedbackKind::kParsimony: return "Parsimony";
    case FeedbackKind::kFaithfulness: return "Faithfulness";
    case FeedbackKind::kFallacyRevision: return "FallacyRevision";
    case FeedbackKind::kSolverAddition: return "SolverAddition";
  }
  return "?";
}

inline std::string_view to_string(Criterion c) {
  switch (c) {
    case Criterion::kAccuracy: return "Accuracy";
    case Criterion::kCompleteness: return "Completeness";
    case Criterion::kParsimony: return "Parsimony";
  }
  return "?";
}

inline FeedbackKind feedback_kind(Criterion c) {
  switch (c) {
    case Criterion::kAccuracy: return FeedbackKind::kAccuracy;
    case Criterion::kCompleteness: return FeedbackKind::kCompleteness;
    case Criterion::kParsimony: return FeedbackKind::kParsimony;
  }
  return FeedbackKind::kFaithfulness;
}

inline std::optional<Criterion> parse_criterion(std::string_view s) {
  std::string lower;
  for (char c : s) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "accuracy") return Criterion::kAccuracy;
  if (lower == "completeness") return Criterion::kCompleteness;
  if (lower == "parsimony") return Criterion::kParsimony;
  return std::nullopt;
}

// JSON forms. Field names for premises/conclusion/fallacy match the corpus
// file layout.

inline json to_json(const NamedFallacy& f) {
  return {{"name", f.name}, {"rationale", f.rationale}};
}

inline json to_json(const FallacyReport& r) {
  json informal = json::array();
  for (const auto& f : r.informal) informal.push_back(to_json(f));
  return {{"formal", r.formal ? to_json(*r.formal) : json(nullptr)},
          {"informal", informal},
          {"none_detected", r.none_detected()}};
}

inline NamedFallacy named_fallacy_from_json(const json& j) {
  NamedFallacy f{j.at("name").get<std::string>(), j.at("rationale").get<std::string>()};
  if (f.name.empty()) throw InvalidArgument("fallacy with empty name");
  return f;
}

inline FallacyReport fallacy_report_from_json(const json& j) {
  FallacyReport r;
  if (j.contains("formal") && !j.at("formal").is_null()) {
    r.formal = named_fallacy_from_json(j.at("formal"));
  }
  if (j.contains("informal")) {
    for (const auto& f : j.at("informal")) r.informal.push_back(named_fallacy_from_json(f));
  }
  if (j.contains("none_detected") &&
      j.at("none_detected").get<bool>() != r.none_detected()) {
    throw InvalidArgument("fallacy none_detected flag contradicts its entries");
  }
  return r;
}

inline json to_json(const Premise& p) {
  return {{"label", p.label}, {"text", p.text}, {"implicit", p.implicit}};
}

inline json premises_to_json(const std::vector<Premise>& ps) {
  json out = json::array();
  for (const auto& p : ps) out.push_back(to_json(p));
  return out;
}

inline std::vector<Premise> premises_from_json(const json& j) {
  std::vector<Premise> out;
  for (const auto& p : j) {
    out.push_back({p.at("label").get<std::string>(), p.at("text").get<std::string>(),
                   p.value("implicit", false)});
  }
  return out;
}

inline json to_json(const Reconstruction& r) {
  return {{"premises", premises_to_json(r.premises)},
          {"intermediate_conclusions", r.intermediate_conclusions},
          {"conclusion", r.conclusion},
          {"connections", r.connections}};
}

inline Reconstruction reconstruction_from_json(const json& j) {
  Reconstruction r;
  r.premises = premises_from_json(j.at("premises"));
  r.intermediate_conclusions =
      j.value("intermediate_conclusions", std::vector<std::string>{});
  r.conclusion = j.at("conclusion").get<std::string>();
  r.connections = j.value("connections", std::string{});
  return r;
}

inline json to_json(const Formalization& f) {
  json keys = json::array();
  for (const auto& e : f.keys.entries()) {
    keys.push_back({{"symbol", e.symbol}, {"params", e.params}, {"phrase", e.phrase}});
  }
  json premises = json::array();
  for (const auto& p : f.premises) {
    premises.push_back({{"label", p.label}, {"formula", fol::render_formula(p.formula)}});
  }
  json additions = json::array();
  for (const auto& a : f.additions) additions.push_back(fol::render_formula(a));
  return {{"keys", keys},
          {"premises", premises},
          {"conclusion", fol::render_formula(f.conclusion)},
          {"additions", additions}};
}

inline json to_json(const Feedback& f) {
  return {{"kind", std::string(to_string(f.kind))}, {"message", f.message}};
}

inline json feedback_to_json(const std::vector<Feedback>& fs) {
  json out = json::array();
  for (const auto& f : fs) out.push_back(to_json(f));
  return out;
}

}  // namespace gaar::pipeline
