#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gaar/error.hpp"
#include "gaar/pipeline/types.hpp"
#include "json.hpp"

namespace gaar::dataset {

using nlohmann::json;
using pipeline::FallacyReport;
using pipeline::Reconstruction;

enum class Source {
  kProcon,
  kProsAndCons1950,
  kProsAndCons2010,
  kNytRoomForDebate,
  kAnthropicPersuasion,
  kSynthetic,
  kSyntheticFallacious,
};

inline constexpr std::array<Source, 7> kAllSources = {
    Source::kProcon,           Source::kProsAndCons1950,     Source::kProsAndCons2010,
    Source::kNytRoomForDebate, Source::kAnthropicPersuasion, Source::kSynthetic,
    Source::kSyntheticFallacious};

// Tag used in corpus files.
inline std::string_view to_string(Source s) {
  switch (s) {
    case Source::kProcon: return "procon-org";
    case Source::kProsAndCons1950: return "pros-and-cons-1950";
    case Source::kProsAndCons2010: return "pros-and-cons-2010";
    case Source::kNytRoomForDebate: return "nyt-room-for-debate";
    case Source::kAnthropicPersuasion: return "anthropic-persuasion";
    case Source::kSynthetic: return "synthetic";
    case Source::kSyntheticFallacious: return "synthetic-fallacious";
  }
  return "?";
}

// Row label for reports.
inline std::string_view display_name(Source s) {
  switch (s) {
    case Source::kProcon: return "Procon.org";
    case Source::kProsAndCons1950: return "Pros-and-cons-1950";
    case Source::kProsAndCons2010: return "Pros-and-cons-2010";
    case Source::kNytRoomForDebate: return "NYT-room-for-debate";
    case Source::kAnthropicPersuasion: return "Anthropic-Persuasion";
    case Source::kSynthetic: return "Synthetic Arguments";
    case Source::kSyntheticFallacious: return "Synthetic Fallacious Arguments";
  }
  return "?";
}

inline std::optional<Source> parse_source(std::string_view tag) {
  for (Source s : kAllSources) {
    if (tag == to_string(s)) return s;
  }
  return std::nullopt;
}

enum class AuthorKind { kHuman, kLlm };

inline std::string_view to_string(AuthorKind k) {
  return k == AuthorKind::kHuman ? "human" : "llm";
}

struct ArguinasRecord {
  std::string id;
  Source source = Source::kSynthetic;
  std::string title;
  std::optional<std::string> background;
  std::string argument;
  Reconstruction reconstruction;
  std::optional<FallacyReport> fallacy;
  AuthorKind author_kind = AuthorKind::kHuman;

  void validate() const {
    if (id.empty()) throw InvalidArgument("record has an empty id");
    if (argument.empty()) throw InvalidArgument("record " + id + " has an empty argument");
    if (reconstruction.premises.empty()) {
      throw InvalidArgument("record " + id + " has no premises");
    }
    if (reconstruction.conclusion.empty()) {
      throw InvalidArgument("record " + id + " has no conclusion");
    }
  }

  friend bool operator==(const ArguinasRecord&, const ArguinasRecord&) = default;
};

// Only premises and conclusion of the reconstruction are stored; the corpus
// layout has no field for intermediate conclusions or connections.
inline json to_json(const ArguinasRecord& r) {
  return {{"id", r.id},
          {"source", std::string(to_string(r.source))},
          {"title", r.title},
          {"background", r.background ? json(*r.background) : json(nullptr)},
          {"argument", r.argument},
          {"premises", pipeline::premises_to_json(r.reconstruction.premises)},
          {"conclusion", r.reconstruction.conclusion},
          {"fallacy", r.fallacy ? pipeline::to_json(*r.fallacy) : json(nullptr)},
          {"author_kind", std::string(to_string(r.author_kind))}};
}

inline ArguinasRecord record_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("record is not an object");
  ArguinasRecord r;
  r.id = j.at("id").get<std::string>();
  const std::string tag = j.at("source").get<std::string>();
  auto source = parse_source(tag);
  if (!source) throw InvalidArgument("unknown source tag '" + tag + "'");
  r.source = *source;
  r.title = j.at("title").get<std::string>();
  if (j.contains("background") && !j.at("background").is_null()) {
    r.background = j.at("background").get<std::string>();
  }
  r.argument = j.at("argument").get<std::string>();
  r.reconstruction.premises = pipeline::premises_from_json(j.at("premises"));
  r.reconstruction.conclusion = j.at("conclusion").get<std::string>();
  if (j.contains("fallacy") && !j.at("fallacy").is_null()) {
    r.fallacy = pipeline::fallacy_report_from_json(j.at("fallacy"));
  }
  const std::string author = j.at("author_kind").get<std::string>();
  if (author == "human") {
    r.author_kind = AuthorKind::kHuman;
  } else if (author == "llm") {
    r.author_kind = AuthorKind::kLlm;
  } else {
    throw InvalidArgument("author_kind must be human or llm, got '" + author + "'");
  }
  r.validate();
  return r;
}

// Decodes one corpus line; `line` is only used for the error position.
inline ArguinasRecord decode_line(const std::string& text, std::size_t line) {
  try {
    return record_from_json(json::parse(text));
  } catch (const json::exception& e) {
    throw DecodeError(line, e.what());
  } catch (const InvalidArgument& e) {
    throw DecodeError(line, e.what());
  }
}

// Blank lines are skipped; the first bad line aborts the read.
inline std::vector<ArguinasRecord> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError("cannot read corpus " + path.string());
  std::vector<ArguinasRecord> out;
  std::string text;
  for (std::size_t line = 1; std::getline(in, text); ++line) {
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (text.find_first_not_of(" \t") == std::string::npos) continue;
    out.push_back(decode_line(text, line));
  }
  return out;
}

inline void write_corpus(const std::vector<ArguinasRecord>& records,
                         const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError("cannot write corpus " + path.string());
  for (const auto& r : records) {
    r.validate();
    out << to_json(r).dump() << '\n';
  }
  if (!out) throw DatasetError("write failed for " + path.string());
}

}  // namespace gaar::dataset
