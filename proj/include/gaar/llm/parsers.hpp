#pragma once

// Typed readers for the structured responses each pipeline stage asks for,
// and the matching writers used to build prompts and fixtures.

#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gaar/error.hpp"
#include "gaar/fol/keys.hpp"
#include "gaar/fol/parser.hpp"
#include "gaar/fol/render.hpp"
#include "gaar/fol/signature.hpp"
#include "gaar/llm/sections.hpp"
#include "gaar/pipeline/types.hpp"

namespace gaar::llm {

using pipeline::Criterion;
using pipeline::FallacyReport;
using pipeline::Formalization;
using pipeline::NamedFallacy;
using pipeline::Premise;
using pipeline::Reconstruction;

struct LabeledLine {
  std::string label;
  std::string text;
};

namespace detail {

// "P3: text", "- P3: text", "**P3:** text", "P3. text"
inline const std::regex& premise_line_re() {
  static const std::regex re(R"(^\s*(?:[-*]\s+)?\**\s*(P\d+)\s*\**\s*[:.)]\s*\**\s*(.*)$)");
  return re;
}

inline std::string strip_bullet(std::string s) {
  s = text::trim(s);
  if (s.size() >= 2 && (s[0] == '-' || s[0] == '*') && s[1] == ' ') s = text::trim(s.substr(2));
  return s;
}

// "C: text", "Conclusion: text", "∴ text" -> "text"
inline std::string strip_conclusion_marker(std::string s) {
  s = strip_bullet(std::move(s));
  static const std::regex re(R"(^\**\s*(?:C|Conclusion)\s*\**\s*:\s*\**\s*(.*)$)",
                             std::regex::icase);
  std::smatch m;
  if (std::regex_match(s, m, re)) return text::trim(m[1].str());
  if (s.rfind("\xE2\x88\xB4", 0) == 0) return text::trim(s.substr(3));  // ∴
  return s;
}

inline std::string join_body(std::string_view body) {
  std::string out;
  for (const auto& line : text::lines(body)) {
    std::string t = text::trim(line);
    if (t.empty()) continue;
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

}  // namespace detail

// Lines labeled P<n>; unlabeled lines continue the previous entry. Text
// before the first label is an error.
inline std::vector<LabeledLine> parse_labeled_lines(std::string_view body,
                                                    std::string_view section) {
  std::vector<LabeledLine> out;
  for (const auto& raw : text::lines(body)) {
    std::string line = text::trim(raw);
    if (line.empty()) continue;
    std::smatch m;
    if (std::regex_match(line, m, detail::premise_line_re())) {
      out.push_back({m[1].str(), text::trim(m[2].str())});
      continue;
    }
    if (out.empty()) {
      throw ParseError("unlabeled line in \"" + std::string(section) + "\": " + line);
    }
    out.back().text += (out.back().text.empty() ? "" : " ") + line;
  }
  return out;
}

inline void require_consecutive(const std::vector<LabeledLine>& lines,
                                std::string_view section) {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].label != "P" + std::to_string(i + 1)) {
      throw ParseError("\"" + std::string(section) + "\" labels must run P1..Pn; found " +
                       lines[i].label + " at position " + std::to_string(i + 1));
    }
  }
}

// "(Implicit) text" -> {true, "text"}
inline std::pair<bool, std::string> split_implicit(std::string s) {
  static const std::regex re(R"(^[\(\[]\s*implicit\s*[\)\]]\s*:?\s*(.*)$)", std::regex::icase);
  std::smatch m;
  if (std::regex_match(s, m, re)) return {true, text::trim(m[1].str())};
  return {false, std::move(s)};
}

// ---- reconstruction ------------------------------------------------------

inline Reconstruction parse_reconstruction(std::string_view response) {
  const auto sections = split_sections(response);
  const Section& premises = require_section(sections, "Premises", "## Premises");
  const Section& conclusion = require_section(sections, "Conclusion", "## Conclusion");

  Reconstruction r;
  auto lines = parse_labeled_lines(premises.body, "## Premises");
  if (lines.empty()) throw ParseError("\"## Premises\" lists no premises");
  require_consecutive(lines, "## Premises");
  for (auto& l : lines) {
    auto [implicit, body] = split_implicit(std::move(l.text));
    if (body.empty()) throw ParseError("premise " + l.label + " is empty");
    r.premises.push_back({l.label, body, implicit});
  }

  if (const Section* ic = find_section(sections, "Intermediate Conclusions");
      ic != nullptr && !text::is_none(ic->body)) {
    static const std::regex marker(R"(^\**\s*(?:IC|I|C)\d+\s*\**\s*[:.)]\s*\**\s*(.*)$)");
    for (const auto& raw : text::lines(ic->body)) {
      std::string line = detail::strip_bullet(raw);
      if (line.empty()) continue;
      std::smatch m;
      if (std::regex_match(line, m, marker)) line = text::trim(m[1].str());
      if (!line.empty()) r.intermediate_conclusions.push_back(line);
    }
  }

  r.conclusion = detail::strip_conclusion_marker(detail::join_body(conclusion.body));
  if (r.conclusion.empty()) throw ParseError("\"## Conclusion\" is empty");

  if (const Section* c = find_section(sections, "Logical Connections")) {
    r.connections = text::trim(c->body);
  }
  return r;
}

inline std::string render_premise_lines(const std::vector<Premise>& premises) {
  std::string out;
  for (const auto& p : premises) {
    out += p.label + ": " + (p.implicit ? "(Implicit) " : "") + p.text + "\n";
  }
  return out;
}

inline std::string render_reconstruction(const Reconstruction& r) {
  std::string out = "# Argument Reconstruction\n\n## Premises\n";
  out += render_premise_lines(r.premises);
  out += "\n## Intermediate Conclusions\n";
  if (r.intermediate_conclusions.empty()) {
    out += "None\n";
  } else {
    for (std::size_t i = 0; i < r.intermediate_conclusions.size(); ++i) {
      out += "IC" + std::to_string(i + 1) + ": " + r.intermediate_conclusions[i] + "\n";
    }
  }
  out += "\n## Conclusion\nC: " + r.conclusion + "\n";
  if (!r.connections.empty()) out += "\n## Logical Connections\n" + r.connections + "\n";
  return out;
}

// ---- fallacy report ------------------------------------------------------

namespace detail {

// "name: rationale" with the rationale possibly continuing on later lines.
inline std::vector<NamedFallacy> parse_fallacy_entries(std::string_view body,
                                                       std::string_view section,
                                                       bool bulleted) {
  std::vector<NamedFallacy> out;
  for (const auto& raw : text::lines(body)) {
    std::string t = text::trim(raw);
    if (t.empty()) continue;
    const bool bullet = t.size() >= 2 && (t[0] == '-' || t[0] == '*') && t[1] == ' ';
    const bool starts_entry = out.empty() || (bulleted && bullet);
    if (!starts_entry) {
      out.back().rationale += (out.back().rationale.empty() ? "" : " ") + t;
      continue;
    }
    t = strip_bullet(t);
    auto colon = t.find(':');
    if (colon == std::string::npos) {
      throw ParseError("\"" + std::string(section) + "\" entry lacks \"name: rationale\": " + t);
    }
    std::string name = text::trim(t.substr(0, colon));
    while (!name.empty() && name.front() == '*') name.erase(name.begin());
    while (!name.empty() && name.back() == '*') name.pop_back();
    name = text::trim(name);
    if (name.empty()) throw ParseError("\"" + std::string(section) + "\" entry has no name");
    out.push_back({name, text::trim(t.substr(colon + 1))});
  }
  for (const auto& f : out) {
    if (f.rationale.empty()) {
      throw ParseError("fallacy \"" + f.name + "\" has an empty rationale");
    }
  }
  return out;
}

}  // namespace detail

inline FallacyReport parse_fallacy(std::string_view response) {
  const auto sections = split_sections(response);
  const Section& formal = require_section(sections, "Formal Fallacy", "# Formal Fallacy");
  const Section* informal = find_section(sections, "Informal Fallacies");
  if (informal == nullptr) informal = find_section(sections, "Informal Fallacy");
  if (informal == nullptr) {
    throw ParseError("response is missing the \"# Informal Fallacies\" section");
  }
  FallacyReport r;
  if (!text::is_none(formal.body)) {
    auto entries = detail::parse_fallacy_entries(formal.body, "# Formal Fallacy", false);
    r.formal = entries.front();
  }
  if (!text::is_none(informal->body)) {
    r.informal = detail::parse_fallacy_entries(informal->body, "# Informal Fallacies", true);
  }
  return r;
}

inline std::string render_fallacy(const FallacyReport& r) {
  std::string out = "# Formal Fallacy\n";
  out += r.formal ? r.formal->name + ": " + r.formal->rationale + "\n" : "None\n";
  out += "\n# Informal Fallacies\n";
  if (r.informal.empty()) out += "None\n";
  for (const auto& f : r.informal) out += "- " + f.name + ": " + f.rationale + "\n";
  return out;
}

// ---- formalization -------------------------------------------------------

namespace detail {

inline fol::SymbolKeys parse_keys(std::string_view body) {
  static const std::regex re(
      R"(^\s*(?:[-*]\s+)?\**\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\(([^)]*)\))?\s*\**\s*=\s*(.*)$)");
  std::vector<fol::KeyEntry> entries;
  for (const auto& raw : text::lines(body)) {
    std::string line = text::trim(raw);
    if (line.empty()) continue;
    std::smatch m;
    if (std::regex_match(line, m, re)) {
      fol::KeyEntry e;
      e.symbol = m[1].str();
      std::string params = m[2].str();
      std::size_t start = 0;
      while (start <= params.size() && !params.empty()) {
        auto comma = params.find(',', start);
        std::string p = text::trim(params.substr(start, comma - start));
        if (!p.empty()) e.params.push_back(p);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
      e.phrase = text::trim(m[3].str());
      entries.push_back(std::move(e));
      continue;
    }
    if (entries.empty()) throw ParseError("unrecognized key line: " + line);
    entries.back().phrase += (entries.back().phrase.empty() ? "" : " ") + line;
  }
  fol::SymbolKeys keys;
  for (auto& e : entries) {
    try {
      keys.add(std::move(e));
    } catch (const InvalidArgument& ex) {
      throw ParseError(ex.what());
    }
  }
  return keys;
}

inline fol::Formula parse_formula_line(const std::string& where, const std::string& text) {
  try {
    return fol::parse_formula(text);
  } catch (const fol::FolError& e) {
    throw ParseError(where + " does not parse (" + e.what() + "): " + text);
  }
}

}  // namespace detail

// Reads keys, one formula per reconstruction premise, the conclusion and any
// "## Missing Formalized Premises". `expected_labels` are the reconstruction's
// premise labels; the formalized labels must match them exactly.
inline Formalization parse_formalization(std::string_view response,
                                         const std::vector<std::string>& expected_labels) {
  const auto sections = split_sections(response);
  const Section* keys = find_section(sections, "Defined Variables/Predicates");
  if (keys == nullptr) keys = find_section(sections, "Keys");
  if (keys == nullptr) {
    throw ParseError("response is missing the \"## Defined Variables/Predicates\" section");
  }
  const Section& premises =
      require_section(sections, "Formalized Premises", "## Formalized Premises");
  const Section& conclusion =
      require_section(sections, "Formalized Conclusion", "## Formalized Conclusion");

  Formalization f;
  f.keys = detail::parse_keys(keys->body);

  auto lines = parse_labeled_lines(premises.body, "## Formalized Premises");
  std::vector<std::string> got;
  for (const auto& l : lines) got.push_back(l.label);
  if (got != expected_labels) {
    auto join = [](const std::vector<std::string>& v) {
      std::string s;
      for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
      return s.empty() ? std::string("(none)") : s;
    };
    throw ParseError("formalized premise labels " + join(got) +
                     " do not match reconstruction labels " + join(expected_labels));
  }
  for (const auto& l : lines) {
    f.premises.push_back({l.label, detail::parse_formula_line("premise " + l.label, l.text)});
  }

  const std::string c = detail::strip_conclusion_marker(detail::join_body(conclusion.body));
  if (c.empty()) throw ParseError("\"## Formalized Conclusion\" is empty");
  f.conclusion = detail::parse_formula_line("conclusion", c);

  if (const Section* add = find_section(sections, "Missing Formalized Premises");
      add != nullptr && !text::is_none(add->body)) {
    static const std::regex label(R"(^\**\s*[A-Za-z]*\d*\s*\**\s*:\s*(.*)$)");
    for (const auto& raw : text::lines(add->body)) {
      std::string line = detail::strip_bullet(raw);
      if (line.empty()) continue;
      std::smatch m;
      if (std::regex_match(line, m, label)) line = text::trim(m[1].str());
      f.additions.push_back(detail::parse_formula_line("missing premise", line));
    }
  }

  std::vector<fol::Formula> all;
  for (const auto& p : f.premises) all.push_back(p.formula);
  all.push_back(f.conclusion);
  for (const auto& a : f.additions) all.push_back(a);
  fol::Signature sig;
  try {
    sig = fol::signature_of(all);
  } catch (const fol::FolError& e) {
    throw ParseError(std::string("inconsistent formalization: ") + e.what());
  }
  const auto missing = fol::missing_keys(f.keys, sig);
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) names += (names.empty() ? "" : ", ") + m;
    throw pipeline::KeyCoverageError("no key for symbol(s) " + names);
  }
  return f;
}

inline std::string render_formula_lines(const solver::LabeledPremises& premises) {
  std::string out;
  for (const auto& p : premises) out += p.label + ": " + fol::render_formula(p.formula) + "\n";
  return out;
}

inline std::string render_formalization(const Formalization& f) {
  std::string out = "## Defined Variables/Predicates\n" + fol::render_keys(f.keys) + "\n";
  out += "\n## Formalized Premises\n" + render_formula_lines(f.premises);
  out += "\n## Formalized Conclusion\nC: " + fol::render_formula(f.conclusion) + "\n";
  out += "\n## Missing Formalized Premises\n";
  if (f.additions.empty()) out += "None\n";
  for (const auto& a : f.additions) out += "- " + fol::render_formula(a) + "\n";
  return out;
}

// ---- streamlining --------------------------------------------------------

// One sentence per retained formula, matched by label; implicit flags come
// from the reconstruction the formulas were derived from.
inline Reconstruction parse_streamline(std::string_view response,
                                       const solver::LabeledPremises& retained,
                                       const Reconstruction& source) {
  const auto sections = split_sections(response);
  const Section& premises = require_section(sections, "NL Premises", "### NL Premises");
  const Section& conclusion = require_section(sections, "NL Conclusion", "### NL Conclusion");
  auto lines = parse_labeled_lines(premises.body, "### NL Premises");
  if (lines.size() != retained.size()) {
    throw ParseError("\"### NL Premises\" has " + std::to_string(lines.size()) +
                     " entries for " + std::to_string(retained.size()) + " formulas");
  }
  Reconstruction r;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].label != retained[i].label) {
      throw ParseError("\"### NL Premises\" entry " + lines[i].label + " where " +
                       retained[i].label + " was expected");
    }
    auto [marked, body] = split_implicit(lines[i].text);
    if (body.empty()) throw ParseError("premise " + lines[i].label + " is empty");
    bool implicit = marked;
    for (const auto& p : source.premises) {
      if (p.label == lines[i].label) implicit = p.implicit;
    }
    r.premises.push_back({lines[i].label, body, implicit});
  }
  r.conclusion = detail::strip_conclusion_marker(detail::join_body(conclusion.body));
  if (r.conclusion.empty()) throw ParseError("\"### NL Conclusion\" is empty");
  return r;
}

inline std::string render_streamline(const Reconstruction& r) {
  std::string out = "### NL Premises\n";
  for (const auto& p : r.premises) out += p.label + ": " + p.text + "\n";
  out += "\n### NL Conclusion\n" + r.conclusion + "\n";
  return out;
}

// ---- faithfulness --------------------------------------------------------

struct CriterionVerdict {
  bool pass = false;
  std::string explanation;
  friend bool operator==(const CriterionVerdict&, const CriterionVerdict&) = default;
};

struct FaithfulnessVerdict {
  std::map<Criterion, CriterionVerdict> criteria;  // fine-grained mode only
  bool faithful = false;                          // the "# Faithfulness" line
  std::string reasoning;

  bool converged() const {
    if (!faithful) return false;
    for (const auto& [c, v] : criteria) {
      if (!v.pass) return false;
    }
    return true;
  }
};

namespace detail {

// First non-blank line must start with Yes or No; the remaining text is the
// explanation.
inline CriterionVerdict parse_yes_no(std::string_view body, std::string_view section) {
  auto ls = text::lines(body);
  std::size_t i = 0;
  while (i < ls.size() && text::trim(ls[i]).empty()) ++i;
  if (i == ls.size()) throw ParseError("\"" + std::string(section) + "\" has no Yes/No verdict");
  std::string first = text::trim(ls[i]);
  while (!first.empty() && (first.front() == '*' || first.front() == '[')) first.erase(first.begin());
  const std::string low = text::lower(first);
  auto word_at = [&](std::string_view w) {
    return low.rfind(w, 0) == 0 &&
           (low.size() == w.size() || !std::isalpha(static_cast<unsigned char>(low[w.size()])));
  };
  CriterionVerdict v;
  std::string rest;
  if (word_at("yes")) {
    v.pass = true;
    rest = first.substr(3);
  } else if (word_at("no")) {
    v.pass = false;
    rest = first.substr(2);
  } else {
    throw ParseError("\"" + std::string(section) + "\" must start with Yes or No, got: " +
                     text::trim(ls[i]));
  }
  rest = text::trim(rest);
  while (!rest.empty() && (rest.front() == '*' || rest.front() == ']' || rest.front() == '.' ||
                           rest.front() == ',' || rest.front() == ':' || rest.front() == '-')) {
    rest.erase(rest.begin());
  }
  std::string explanation = text::trim(rest);
  for (std::size_t j = i + 1; j < ls.size(); ++j) explanation += "\n" + ls[j];
  v.explanation = text::trim(explanation);
  return v;
}

}  // namespace detail

// Fine-grained mode requires a "# <Criterion>" section per enabled
// criterion; both modes require "# Faithfulness".
inline FaithfulnessVerdict parse_faithfulness(std::string_view response,
                                              const std::set<Criterion>& criteria,
                                              bool fine_grained = true) {
  const auto sections = split_sections(response);
  const Section& overall = require_section(sections, "Faithfulness", "# Faithfulness");
  FaithfulnessVerdict v;
  v.faithful = detail::parse_yes_no(overall.body, "# Faithfulness").pass;
  if (const Section* r = find_section(sections, "Reasoning")) v.reasoning = text::trim(r->body);
  if (fine_grained) {
    for (Criterion c : criteria) {
      const std::string name(pipeline::to_string(c));
      const Section& s = require_section(sections, name, "# " + name);
      v.criteria[c] = detail::parse_yes_no(s.body, "# " + name);
    }
  }
  return v;
}

inline std::string render_faithfulness(const FaithfulnessVerdict& v) {
  std::string out = "# Reasoning\n" + (v.reasoning.empty() ? std::string("-") : v.reasoning) + "\n";
  for (const auto& [c, cv] : v.criteria) {
    out += "\n# " + std::string(pipeline::to_string(c)) + "\n" + (cv.pass ? "Yes" : "No") + "\n";
    if (!cv.explanation.empty()) out += cv.explanation + "\n";
  }
  out += "\n# Faithfulness\n" + std::string(v.faithful ? "Yes" : "No") + "\n";
  return out;
}

}  // namespace gaar::llm
