#pragma once

#include <sstream>
#include <string>
#include <string_view>

#include "gaar/error.hpp"
#include "gaar/fol/parser.hpp"
#include "gaar/fol/render.hpp"
#include "gaar/solver/validity.hpp"

namespace gaar::solver {

// Plain-text problem: one premise per line, optionally "LABEL: formula"
// (unlabeled lines become P<n>), and a final "CONCLUSION: formula" line.
// Blank lines and lines starting with '#' are ignored.
struct Problem {
  LabeledPremises premises;
  Formula conclusion;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' ||
                        s.front() == '\r')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace detail

inline Problem parse_problem(std::string_view text) {
  Problem problem;
  bool have_conclusion = false;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (have_conclusion) {
      throw InvalidArgument("line " + std::to_string(line_no) +
                            ": content after the CONCLUSION line");
    }
    std::string label;
    std::string_view body = line;
    if (auto colon = line.find(':'); colon != std::string_view::npos) {
      label = std::string(detail::trim(line.substr(0, colon)));
      body = detail::trim(line.substr(colon + 1));
    }
    try {
      if (label == "CONCLUSION") {
        problem.conclusion = fol::parse_formula(body);
        have_conclusion = true;
        continue;
      }
      if (label.empty()) {
        label = "P" + std::to_string(problem.premises.size() + 1);
      }
      problem.premises.push_back({label, fol::parse_formula(body)});
    } catch (const fol::FolError& e) {
      throw InvalidArgument("line " + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
  if (!have_conclusion) {
    throw InvalidArgument("problem has no CONCLUSION line");
  }
  return problem;
}

inline std::string render_problem(const LabeledPremises& premises,
                                  const Formula& conclusion,
                                  fol::Style style = fol::Style::kUnicode) {
  std::string out;
  for (const auto& p : premises) {
    out += p.label + ": " + fol::render_formula(p.formula, style) + "\n";
  }
  out += "CONCLUSION: " + fol::render_formula(conclusion, style) + "\n";
  return out;
}

}  // namespace gaar::solver
