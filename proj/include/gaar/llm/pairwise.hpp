#pragma once

#include <map>
#include <string>
#include <string_view>

#include "gaar/error.hpp"
#include "gaar/llm/sections.hpp"
#include "gaar/pipeline/types.hpp"
#include "json.hpp"

namespace gaar::llm {

enum class Side { kA, kB, kTie };

struct CriterionOutcome {
  Side winner = Side::kTie;
  int disparity = 0;  // 1..5 plus signs for a winner, 0 for a tie
  friend bool operator==(const CriterionOutcome&, const CriterionOutcome&) = default;
};

struct PairwiseJudgment {
  std::map<pipeline::Criterion, CriterionOutcome> criteria;
  Side overall = Side::kTie;
  std::string reasoning;
};

inline std::string_view to_string(Side s) {
  switch (s) {
    case Side::kA: return "A";
    case Side::kB: return "B";
    case Side::kTie: return "TIE";
  }
  return "?";
}

namespace detail {

inline CriterionOutcome parse_outcome(const std::string& raw, std::string_view field) {
  const std::string v = text::trim(raw);
  if (text::lower(v) == "tie") return {Side::kTie, 0};
  if (v.size() >= 2 && (v[0] == 'A' || v[0] == 'B')) {
    const std::string plus = v.substr(1);
    if (plus.find_first_not_of('+') == std::string::npos && plus.size() <= 5) {
      return {v[0] == 'A' ? Side::kA : Side::kB, static_cast<int>(plus.size())};
    }
  }
  throw ParseError("illegal " + std::string(field) + " rating: \"" + v +
                   "\" (expected A or B with 1-5 '+', or TIE)");
}

}  // namespace detail

// Reads the judge's JSON object; anything outside the outermost braces is
// ignored.
inline PairwiseJudgment parse_pairwise_judgment(std::string_view response) {
  const auto open = response.find('{');
  const auto close = response.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw ParseError("pairwise judgment contains no JSON object");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(response.substr(open, close - open + 1));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed pairwise judgment: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("pairwise judgment is not an object");
  auto field = [&](const char* name) -> std::string {
    if (!j.contains(name) || !j[name].is_string()) {
      throw ParseError(std::string("pairwise judgment lacks string field \"") + name + "\"");
    }
    return j[name].get<std::string>();
  };
  PairwiseJudgment out;
  for (pipeline::Criterion c : pipeline::kAllCriteria) {
    const std::string name = text::lower(pipeline::to_string(c));
    out.criteria[c] = detail::parse_outcome(field(name.c_str()), name);
  }
  const std::string overall = text::trim(field("overall_winner"));
  if (overall == "A") {
    out.overall = Side::kA;
  } else if (overall == "B") {
    out.overall = Side::kB;
  } else if (text::lower(overall) == "tie") {
    out.overall = Side::kTie;
  } else {
    throw ParseError("illegal overall_winner: \"" + overall + "\"");
  }
  if (j.contains("reasoning") && j["reasoning"].is_string()) {
    out.reasoning = j["reasoning"].get<std::string>();
  }
  return out;
}

}  // namespace gaar::llm
