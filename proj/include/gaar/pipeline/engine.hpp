#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gaar/error.hpp"
#include "gaar/fol/keys.hpp"
#include "gaar/fol/render.hpp"
#include "gaar/hash.hpp"
#include "gaar/llm/backend.hpp"
#include "gaar/llm/parsers.hpp"
#include "gaar/llm/template.hpp"
#include "gaar/pipeline/assets.hpp"
#include "gaar/pipeline/trace.hpp"
#include "gaar/pipeline/types.hpp"
#include "gaar/solver/validity.hpp"

namespace gaar::pipeline {

// A stage's response still failed to parse after the format-reminder
// reprompt.
class UnparseableResponse : public llm::BackendError {
 public:
  using llm::BackendError::BackendError;
};

struct StageContext {
  llm::Backend& backend;
  const Assets& assets;
  const PipelineConfig& config;
};

namespace detail {

inline std::string format_reminder(const std::string& error) {
  return "\nYour previous reply could not be used: " + error +
         "\nReply again, keeping exactly the headings and layout requested above.\n";
}

// Renders, sends and parses one stage prompt, with one reprompt on a
// ParseError. Every exchange is appended to `record`.
template <typename Parse>
auto call_stage(const StageContext& ctx, StageRecord& record, const llm::PromptTemplate& t,
                llm::Bindings bindings, Parse&& parse) {
  std::string last_error;
  for (int attempt = 0; attempt < 2; ++attempt) {
    bindings["FORMAT_REMINDER"] = attempt == 0 ? "" : format_reminder(last_error);
    llm::CompletionRequest request;
    request.model = ctx.config.model;
    request.template_name = t.name;
    request.bindings = bindings;
    request.prompt = llm::render_prompt(t, bindings);
    request.decoding.temperature = ctx.config.temperature;
    llm::CompletionResponse response = ctx.backend.complete(request);
    record.attempts.push_back(
        {t.name, sha256_hex(request.prompt), request.prompt, response.text, ""});
    try {
      return parse(response.text);
    } catch (const llm::ParseError& e) {
      last_error = e.what();
      record.attempts.back().error = last_error;
    }
  }
  throw UnparseableResponse(std::string(to_string(record.stage)) +
                            " response unusable after a reprompt: " + last_error);
}

inline std::string background_block(const ArgumentInput& input) {
  if (!input.background || input.background->empty()) return "";
  return "\n# Background\n" + *input.background + "\n";
}

inline std::string describe_fallacies(const FallacyReport& r) {
  std::string out;
  if (r.formal) out += "- Formal: " + r.formal->name + ": " + r.formal->rationale + "\n";
  for (const auto& f : r.informal) out += "- Informal: " + f.name + ": " + f.rationale + "\n";
  return out;
}

inline std::string fallacy_block(const FallacyReport* report) {
  if (report == nullptr) return "";
  if (report->none_detected()) return "\n## Detected Fallacies\nNo fallacy was detected.\n";
  return "\n## Detected Fallacies\nThe fallacy check reported the following. Reconstruct the "
         "argument as the author gave it and keep these defects; do not repair them.\n" +
         describe_fallacies(*report);
}

inline std::string feedback_block(const std::vector<Feedback>& feedback,
                                  const Reconstruction* previous) {
  if (feedback.empty()) return "";
  std::string out = "\n## Feedback on the Previous Reconstruction\n";
  if (previous != nullptr) {
    out += "Previous premises:\n" + llm::render_premise_lines(previous->premises) +
           "Previous conclusion: " + previous->conclusion + "\n\n";
  }
  out += "Revise the reconstruction so that every point below is addressed.\n";
  for (const auto& f : feedback) {
    out += "- [" + std::string(to_string(f.kind)) + "] " + f.message + "\n";
  }
  return out;
}

// "Note that the argument is ..." wording for the judge: fallacy types only,
// never the rationales.
inline std::string argument_type(const FallacyReport* report) {
  if (report == nullptr) return "not checked for fallacies";
  if (report->none_detected()) return "not fallacious";
  std::string out;
  if (report->formal) out = "formally fallacious (" + report->formal->name + ")";
  if (!report->informal.empty()) {
    std::string names;
    for (const auto& f : report->informal) names += (names.empty() ? "" : ", ") + f.name;
    if (!out.empty()) out += " and ";
    out += "informally fallacious (" + names + ")";
  }
  return out;
}

inline std::string plain_premise_lines(const std::vector<Premise>& premises) {
  std::string out;
  for (const auto& p : premises) out += p.label + ": " + p.text + "\n";
  return out;
}

// Numbered or bulleted items become separate messages; other text is one.
inline std::vector<std::string> split_items(const std::string& text) {
  std::vector<std::string> items;
  bool any_marker = false;
  for (const auto& raw : llm::text::lines(text)) {
    std::string line = llm::text::trim(raw);
    if (line.empty()) continue;
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    bool marker = false;
    if (i > 0 && i + 1 < line.size() && (line[i] == '.' || line[i] == ')') && line[i + 1] == ' ') {
      line = llm::text::trim(line.substr(i + 1));
      marker = true;
    } else if (line.size() > 2 && (line[0] == '-' || line[0] == '*') && line[1] == ' ') {
      line = llm::text::trim(line.substr(2));
      marker = true;
    }
    if (marker || items.empty()) {
      any_marker = any_marker || marker;
      items.push_back(line);
    } else {
      items.back() += " " + line;
    }
  }
  if (!any_marker && !items.empty()) {
    return {llm::text::trim(text)};
  }
  return items;
}

inline std::string render_countermodel(const std::map<std::string, bool>& model) {
  std::string t;
  std::string f;
  std::size_t shown = 0;
  for (const auto& [atom, value] : model) {
    if (++shown > 40) break;
    (value ? t : f) += ((value ? t : f).empty() ? "" : ", ") + atom;
  }
  std::string out = "true: " + (t.empty() ? std::string("(none)") : t) +
                    "; false: " + (f.empty() ? std::string("(none)") : f);
  if (model.size() > 40) out += "; ...";
  return out;
}

}  // namespace detail

// ---- stages ---------------------------------------------------------------

// Stage 1. `revision_context` is non-empty for a fallacy-revision pass.
inline FallacyReport detect_fallacy(const StageContext& ctx, const ArgumentInput& input,
                                    StageRecord& record,
                                    const std::string& revision_context = "") {
  record.stage = StageId::kFallacyDetection;
  llm::Bindings b = {{"TOPIC", input.topic},
                     {"BACKGROUND", detail::background_block(input)},
                     {"ARGUMENT", input.argument},
                     {"REVISION_CONTEXT", revision_context}};
  FallacyReport r = detail::call_stage(ctx, record, ctx.assets.fallacy_detection, b,
                                       [](const std::string& s) { return llm::parse_fallacy(s); });
  record.parsed = to_json(r);
  return r;
}

// Stage 2. `catalog` null drops the scheme instruction; `report` null means
// the fallacy path is off.
inline Reconstruction reconstruct(const StageContext& ctx, const ArgumentInput& input,
                                  const SchemeCatalog* catalog, const FallacyReport* report,
                                  const std::vector<Feedback>& feedback,
                                  const Reconstruction* previous, StageRecord& record) {
  record.stage = StageId::kReconstruction;
  llm::Bindings b = {
      {"TOPIC", input.topic},
      {"BACKGROUND", detail::background_block(input)},
      {"ARGUMENT", input.argument},
      {"SCHEME_INSTRUCTION", catalog ? render_scheme_instruction(*catalog) : ""},
      {"FALLACY", detail::fallacy_block(report)},
      {"FEEDBACK", detail::feedback_block(feedback, previous)}};
  Reconstruction r = detail::call_stage(ctx, record, ctx.assets.reconstruction, b,
                                        [](const std::string& s) {
                                          Reconstruction rec = llm::parse_reconstruction(s);
                                          try {
                                            rec.validate();
                                          } catch (const InvalidArgument& e) {
                                            throw llm::ParseError(e.what());
                                          }
                                          return rec;
                                        });
  record.parsed = to_json(r);
  return r;
}

// Stage 3.
inline Formalization formalize(const StageContext& ctx, const Reconstruction& recon,
                               StageRecord& record) {
  record.stage = StageId::kFormalization;
  std::vector<std::string> labels;
  for (const auto& p : recon.premises) labels.push_back(p.label);
  std::string ic;
  for (std::size_t i = 0; i < recon.intermediate_conclusions.size(); ++i) {
    ic += "IC" + std::to_string(i + 1) + ": " + recon.intermediate_conclusions[i] + "\n";
  }
  llm::Bindings b = {{"PREMISES", detail::plain_premise_lines(recon.premises)},
                     {"INTERMEDIATE", ic.empty() ? "None" : ic},
                     {"CONCLUSION", "C: " + recon.conclusion}};
  Formalization f = detail::call_stage(
      ctx, record, ctx.assets.formalization, b,
      [&](const std::string& s) { return llm::parse_formalization(s, labels); });
  record.parsed = to_json(f);
  return f;
}

// Stage 5.
inline Reconstruction streamline(const StageContext& ctx, const Formalization& f,
                                 const Reconstruction& source, StageRecord& record) {
  record.stage = StageId::kStreamlining;
  llm::Bindings b = {{"DEFINITION", fol::render_keys(f.keys)},
                     {"PREMISES", llm::render_formula_lines(f.premises)},
                     {"CONCLUSION", "C: " + fol::render_formula(f.conclusion)}};
  Reconstruction r = detail::call_stage(
      ctx, record, ctx.assets.streamlining, b,
      [&](const std::string& s) { return llm::parse_streamline(s, f.premises, source); });
  record.parsed = to_json(r);
  return r;
}

struct FaithfulnessResult {
  llm::FaithfulnessVerdict verdict;
  std::vector<Feedback> feedback;
  std::size_t failed = 0;
  bool converged() const { return verdict.converged(); }
};

// Stage 6. Fine-grained mode names each enabled criterion; coarse mode asks
// for the overall verdict only.
inline FaithfulnessResult judge_faithfulness(const StageContext& ctx, const ArgumentInput& input,
                                             const Reconstruction& streamlined,
                                             const FallacyReport* report,
                                             const std::set<Criterion>& criteria,
                                             bool fine_grained, StageRecord& record) {
  record.stage = StageId::kFaithfulness;
  std::string blocks;
  std::string outputs;
  if (fine_grained) {
    blocks = "\nJudge it against each of these criteria:\n";
    for (Criterion c : criteria) {
      blocks += ctx.assets.criterion_block(c);
      outputs += "\n# " + std::string(to_string(c)) +
                 "\n[Yes or No; after No, list each problem as a numbered item]\n";
    }
  }
  llm::Bindings b = {{"TOPIC", input.topic},
                     {"ARGUMENT", input.argument},
                     {"PREMISES", detail::plain_premise_lines(streamlined.premises)},
                     {"CONCLUSION", streamlined.conclusion},
                     {"ARG_TYPE", detail::argument_type(report)},
                     {"CRITERIA", blocks},
                     {"CRITERIA_OUTPUT", outputs}};
  FaithfulnessResult out;
  out.verdict = detail::call_stage(ctx, record, ctx.assets.faithfulness, b,
                                   [&](const std::string& s) {
                                     return llm::parse_faithfulness(s, criteria, fine_grained);
                                   });
  json verdict = {{"faithful", out.verdict.faithful}};
  for (const auto& [c, v] : out.verdict.criteria) {
    verdict[std::string(to_string(c))] = v.pass;
    if (v.pass) continue;
    ++out.failed;
    auto items = detail::split_items(v.explanation);
    if (items.empty()) {
      items.push_back("The reconstruction does not satisfy " + std::string(to_string(c)) + ".");
    }
    for (auto& m : items) out.feedback.push_back({feedback_kind(c), std::move(m)});
  }
  if (!out.verdict.converged() && out.failed == 0) {
    // Coarse mode, or an overall No without a failing criterion.
    ++out.failed;
    out.feedback.push_back(
        {FeedbackKind::kFaithfulness,
         out.verdict.reasoning.empty() ? "The reconstruction is not faithful to the argument."
                                       : out.verdict.reasoning});
  }
  record.parsed = verdict;
  record.verdict = {{"converged", out.verdict.converged()}, {"failed", out.failed}};
  record.feedback = out.feedback;
  return out;
}

// ---- engine ---------------------------------------------------------------

struct RunResult {
  Reconstruction reconstruction;
  std::optional<Formalization> formalization;
  std::optional<FallacyReport> fallacy;
  PipelineTrace trace;
};

namespace detail {

struct Candidate {
  std::size_t iteration = 0;
  std::size_t failed = 0;
  Reconstruction reconstruction;
  std::optional<Formalization> formalization;
};

}  // namespace detail

// Runs Stage 1 once, then Stages 2-6 until the judge accepts the
// reconstruction or max_iterations is reached. Backend failures end the run
// with status Failed; the trace up to that point is kept.
inline RunResult run_gaar(const ArgumentInput& input, const PipelineConfig& config,
                          llm::Backend& backend, const Assets& assets = Assets::defaults()) {
  input.validate();
  config.validate();
  StageContext ctx{backend, assets, config};
  RunResult result;
  PipelineTrace& trace = result.trace;
  trace.input = input;

  std::optional<FallacyReport> report;
  std::optional<detail::Candidate> best;
  std::vector<Feedback> pending;  // feedback for the next Stage 2
  std::optional<Reconstruction> previous;
  std::size_t streak = 0;
  std::size_t revisions = 0;
  const std::size_t all_failed = (config.fine_grained_faithfulness ? config.criteria.size() : 1) + 1;

  auto finish = [&]() {
    if (best) {
      result.reconstruction = best->reconstruction;
      result.formalization = best->formalization;
      trace.selected_iteration = best->iteration;
    }
    result.fallacy = report;
    return result;
  };

  try {
    if (config.fallacy_path) {
      trace.fallacy_detection.emplace();
      report = detect_fallacy(ctx, input, *trace.fallacy_detection);
    }

    for (std::size_t k = 1; k <= config.max_iterations; ++k) {
      trace.iterations.push_back({});
      IterationRecord& iter = trace.iterations.back();
      iter.index = k;
      iter.failed_criteria = all_failed;
      std::vector<Feedback> emitted;
      const FallacyReport* active = report ? &*report : nullptr;

      auto& s2 = iter.stages.emplace_back();
      Reconstruction recon = reconstruct(
          ctx, input, config.scheme_instruction ? &assets.catalog(config.scheme_theory) : nullptr,
          active, pending, previous ? &*previous : nullptr, s2);
      detail::Candidate candidate{k, all_failed, recon, std::nullopt};

      auto& s3 = iter.stages.emplace_back();
      std::optional<Formalization> formal;
      try {
        formal = formalize(ctx, recon, s3);
      } catch (const UnparseableResponse& e) {
        Feedback fb{FeedbackKind::kInvalidity,
                    "The reconstruction could not be formalized: " +
                        (s3.attempts.empty() ? std::string(e.what()) : s3.attempts.back().error)};
        s3.feedback.push_back(fb);
        emitted.push_back(fb);
      }

      bool valid = false;
      if (formal) {
        for (const auto& a : formal->additions) {
          Feedback fb{FeedbackKind::kSolverAddition,
                      "The formalization needs a premise the reconstruction does not state: " +
                          fol::render_formula(a)};
          s3.feedback.push_back(fb);
          emitted.push_back(fb);
        }
        const bool formal_fallacy = active != nullptr && active->has_formal();
        if (formal_fallacy) {
          valid = true;  // Stage 4 is skipped: the argument is invalid by design.
        } else {
          auto& s4 = iter.stages.emplace_back();
          s4.stage = StageId::kValidity;
          try {
            solver::ValidityVerdict v = solver::check_validity(formal->premises, formal->conclusion);
            if (v.valid()) {
              valid = true;
              json verdict = {{"valid", true}};
              if (config.pruning) {
                solver::MinimalSetsOptions opts{config.premise_cap, true};
                auto sets = solver::minimal_premise_sets(formal->premises, formal->conclusion, opts);
                std::set<std::string> keep(sets.union_labels.begin(), sets.union_labels.end());
                std::vector<std::string> removed;
                solver::LabeledPremises kept;
                for (const auto& p : formal->premises) {
                  if (keep.contains(p.label)) {
                    kept.push_back(p);
                  } else {
                    removed.push_back(p.label);
                  }
                }
                formal->premises = std::move(kept);
                verdict["minimal_sets"] = sets.minimal_sets;
                verdict["pruned"] = removed;
                verdict["exact"] = sets.exact;
              }
              s4.verdict = verdict;
            } else {
              std::string message = "The formalized premises do not entail the conclusion.";
              if (v.countermodel) {
                message += " Countermodel (" + detail::render_countermodel(*v.countermodel) + ").";
              }
              message += " Add the missing premise or correct the reconstruction.";
              s4.verdict = {{"valid", false},
                            {"countermodel", v.countermodel ? json(*v.countermodel) : json(nullptr)}};
              s4.feedback.push_back({FeedbackKind::kInvalidity, message});
              emitted.push_back(s4.feedback.back());
            }
          } catch (const solver::SolverError& e) {
            s4.verdict = {{"valid", false}, {"error", e.what()}};
            s4.feedback.push_back({FeedbackKind::kInvalidity,
                                   std::string("The formalization is outside the supported "
                                               "logic fragment: ") +
                                       e.what()});
            emitted.push_back(s4.feedback.back());
          }
        }
        candidate.formalization = formal;
      }

      if (formal && valid) {
        auto& s5 = iter.stages.emplace_back();
        Reconstruction streamlined = streamline(ctx, *formal, recon, s5);
        candidate.reconstruction = streamlined;

        auto& s6 = iter.stages.emplace_back();
        FaithfulnessResult judged = judge_faithfulness(ctx, input, streamlined, active,
                                                       config.criteria,
                                                       config.fine_grained_faithfulness, s6);
        candidate.failed = judged.failed;
        iter.failed_criteria = judged.failed;
        for (const auto& f : judged.feedback) emitted.push_back(f);
        iter.converged = judged.converged();
      }

      if (!best || candidate.failed <= best->failed) best = candidate;
      if (iter.converged) {
        best = candidate;
        trace.status = RunStatus::kConverged;
        return finish();
      }

      previous = candidate.reconstruction;
      ++streak;
      if (config.fallacy_path && streak >= config.fallacy_revision_threshold &&
          revisions < config.max_fallacy_revisions && k < config.max_iterations) {
        std::string context =
            "\n## Context from Earlier Attempts\n" + std::to_string(streak) +
            " reconstruction attempts in a row were not accepted. Earlier fallacy assessment:\n" +
            (report ? llm::render_fallacy(*report) : std::string("None\n")) +
            "Feedback on the latest attempt:\n";
        for (const auto& f : emitted) {
          context += "- [" + std::string(to_string(f.kind)) + "] " + f.message + "\n";
        }
        context += "Reassess the argument with this in mind.\n";
        iter.revision.emplace();
        FallacyReport revised = detect_fallacy(ctx, input, *iter.revision, context);
        Feedback fb{FeedbackKind::kFallacyRevision,
                    "The fallacy assessment was revised: " +
                        (revised.none_detected() ? std::string("no fallacy detected.")
                                                 : detail::argument_type(&revised) + ".")};
        iter.revision->feedback.push_back(fb);
        emitted.push_back(fb);
        report = std::move(revised);
        streak = 0;
        ++revisions;
      }
      pending = std::move(emitted);
    }
    trace.status = RunStatus::kExhausted;
  } catch (const llm::BackendError& e) {
    trace.status = RunStatus::kFailed;
    trace.error = e.what();
  }
  return finish();
}

}  // namespace gaar::pipeline
