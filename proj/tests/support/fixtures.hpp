#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gaar/pipeline/types.hpp"
#include "json.hpp"

#ifndef GAAR_FIXTURE_DIR
#define GAAR_FIXTURE_DIR "tests/fixtures"
#endif

namespace testsupport {

inline std::filesystem::path fixture_dir() { return GAAR_FIXTURE_DIR; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read fixture " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline gaar::pipeline::ArgumentInput read_argument(const std::filesystem::path& p) {
  auto j = nlohmann::json::parse(read_file(p));
  gaar::pipeline::ArgumentInput in;
  in.topic = j.at("topic").get<std::string>();
  if (j.contains("background")) in.background = j["background"].get<std::string>();
  in.argument = j.at("argument").get<std::string>();
  return in;
}

// Response files of a scripted run, in file-name order.
inline std::vector<std::string> read_responses(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.path().extension() == ".txt") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::string> out;
  for (const auto& f : files) out.push_back(read_file(f));
  return out;
}

struct Walkthrough {
  gaar::pipeline::ArgumentInput input;
  std::vector<std::string> responses;
  std::string expected_final;
  std::filesystem::path cassette;
};

inline Walkthrough walkthrough() {
  const auto dir = fixture_dir() / "walkthrough";
  return {read_argument(dir / "argument.json"), read_responses(dir / "responses"),
          read_file(dir / "expected_final.txt"), dir / "cassette.jsonl"};
}

// Collapses runs of whitespace so comparisons ignore line wrapping.
inline std::string squash(const std::string& s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

}  // namespace testsupport
