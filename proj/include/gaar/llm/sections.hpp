#pragma once

#include <cctype>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gaar/error.hpp"

namespace gaar::llm {

// A markdown-style "#..# Title" heading and the lines up to the next heading.
struct Section {
  int level = 0;
  std::string title;
  std::string body;
  std::size_t line = 0;  // 1-based line of the heading
};

namespace text {

inline std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::vector<std::string> lines(std::string_view s) {
  std::vector<std::string> out;
  std::istringstream in{std::string(s)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(line);
  }
  return out;
}

inline bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) !=
        std::tolower(static_cast<unsigned char>(prefix[i]))) {
      return false;
    }
  }
  return true;
}

// Drops markdown emphasis and a trailing colon so "**Premises:**" compares
// equal to "Premises".
inline std::string normalize_title(std::string_view s) {
  std::string t = trim(s);
  auto strip = [&](char c) {
    while (!t.empty() && t.front() == c) t.erase(t.begin());
    while (!t.empty() && t.back() == c) t.pop_back();
    t = trim(t);
  };
  strip('*');
  if (!t.empty() && t.back() == ':') t.pop_back();
  strip('*');
  return lower(t);
}

// "None", "none.", "N/A": the model's way of saying a list is empty.
inline bool is_none(std::string_view body) {
  std::string t = lower(trim(body));
  while (!t.empty() && (t.back() == '.' || t.back() == '*')) t.pop_back();
  while (!t.empty() && t.front() == '*') t.erase(t.begin());
  return t == "none" || t == "n/a" || t.empty();
}

}  // namespace text

// Splits `response` at heading lines. A heading is one to six '#' followed
// by at least one blank and a title; "##Premises" is not a heading. Lines
// inside ``` fences never start a heading. Text before the first heading is
// dropped.
inline std::vector<Section> split_sections(std::string_view response) {
  std::vector<Section> out;
  bool in_fence = false;
  std::size_t line_no = 0;
  for (const std::string& raw : text::lines(response)) {
    ++line_no;
    std::string_view line = raw;
    std::size_t lead = 0;
    while (lead < line.size() && (line[lead] == ' ' || line[lead] == '\t')) ++lead;
    if (line.substr(lead, 3) == "```") {
      in_fence = !in_fence;
      if (!out.empty()) out.back().body += raw + "\n";
      continue;
    }
    if (!in_fence && lead == 0) {
      std::size_t hashes = 0;
      while (hashes < line.size() && line[hashes] == '#') ++hashes;
      if (hashes >= 1 && hashes <= 6 && hashes < line.size() &&
          (line[hashes] == ' ' || line[hashes] == '\t')) {
        std::string title = text::trim(line.substr(hashes));
        if (!title.empty()) {
          out.push_back({static_cast<int>(hashes), title, "", line_no});
          continue;
        }
      }
    }
    if (!out.empty()) out.back().body += raw + "\n";
  }
  return out;
}

inline const Section* find_section(const std::vector<Section>& sections,
                                   std::string_view title) {
  const std::string want = text::normalize_title(title);
  for (const auto& s : sections) {
    if (text::normalize_title(s.title) == want) return &s;
  }
  return nullptr;
}

// `display` is how the section is named in the error, e.g. "## Premises".
inline const Section& require_section(const std::vector<Section>& sections,
                                      std::string_view title, std::string_view display) {
  if (const Section* s = find_section(sections, title)) return *s;
  throw ParseError("response is missing the \"" + std::string(display) + "\" section");
}

}  // namespace gaar::llm
