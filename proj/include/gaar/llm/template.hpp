#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include "gaar/error.hpp"
#include "gaar/log.hpp"

namespace gaar::llm {

using Bindings = std::map<std::string, std::string>;

namespace detail {

inline bool is_slot_char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

// Calls fn(offset, length, name) for each well-formed [[NAME]] slot.
template <typename Fn>
void for_each_slot(std::string_view body, Fn&& fn) {
  std::size_t pos = 0;
  while ((pos = body.find("[[", pos)) != std::string_view::npos) {
    std::size_t end = pos + 2;
    while (end < body.size() && is_slot_char(body[end])) ++end;
    if (end > pos + 2 && body.substr(end, 2) == "]]") {
      fn(pos, end + 2 - pos, body.substr(pos + 2, end - pos - 2));
      pos = end + 2;
    } else {
      ++pos;
    }
  }
}

}  // namespace detail

inline std::set<std::string> placeholders_in(std::string_view body) {
  std::set<std::string> out;
  detail::for_each_slot(body, [&](std::size_t, std::size_t, std::string_view name) {
    out.emplace(name);
  });
  return out;
}

struct PromptTemplate {
  std::string name;
  std::string body;
  std::set<std::string> required;

  // Every slot occurring in the body is required.
  static PromptTemplate from_body(std::string name, std::string body) {
    PromptTemplate t{std::move(name), std::move(body), {}};
    t.required = placeholders_in(t.body);
    return t;
  }
};

inline PromptTemplate load_template(const std::filesystem::path& path,
                                    std::string name = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read prompt template " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (name.empty()) name = path.stem().string();
  return PromptTemplate::from_body(std::move(name), buf.str());
}

// Substitutes each [[NAME]] slot with its binding in one pass; substituted
// text is never rescanned. Throws MissingPlaceholder when a required or
// occurring slot has no binding. Unused bindings are logged, not rejected.
inline std::string render_prompt(const PromptTemplate& t, const Bindings& bindings) {
  std::string missing;
  auto note_missing = [&](const std::string& name) {
    if (missing.find("[[" + name + "]]") != std::string::npos) return;
    if (!missing.empty()) missing += ", ";
    missing += "[[" + name + "]]";
  };
  for (const auto& name : t.required) {
    if (!bindings.contains(name)) note_missing(name);
  }
  std::set<std::string> used;
  std::string out;
  out.reserve(t.body.size());
  std::size_t last = 0;
  detail::for_each_slot(t.body, [&](std::size_t pos, std::size_t len, std::string_view name) {
    out.append(t.body, last, pos - last);
    last = pos + len;
    auto it = bindings.find(std::string(name));
    if (it == bindings.end()) {
      note_missing(std::string(name));
      return;
    }
    used.insert(it->first);
    out += it->second;
  });
  if (!missing.empty()) {
    throw MissingPlaceholder("template " + t.name + " is missing bindings for " + missing);
  }
  out.append(t.body, last, std::string::npos);
  for (const auto& [name, value] : bindings) {
    if (!used.contains(name)) {
      log::warn("template " + t.name + ": binding " + name + " is unused");
    }
  }
  return out;
}

}  // namespace gaar::llm
