#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "gaar/error.hpp"
#include "json.hpp"

namespace gaar::eval {

using json = nlohmann::json;

enum class Outcome { kAWins, kBWins, kTie };

inline std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::kAWins: return "A";
    case Outcome::kBWins: return "B";
    case Outcome::kTie: return "TIE";
  }
  return "?";
}

inline Outcome parse_outcome(std::string_view s) {
  if (s == "A") return Outcome::kAWins;
  if (s == "B") return Outcome::kBWins;
  if (s == "TIE") return Outcome::kTie;
  throw EvalError("unknown match outcome \"" + std::string(s) + "\"");
}

struct MatchRecord {
  std::string item;
  std::string side_a;
  std::string side_b;
  Outcome outcome = Outcome::kTie;

  void validate() const {
    if (side_a.empty() || side_b.empty()) throw InvalidArgument("match record lacks a side");
    if (side_a == side_b) throw InvalidArgument("match record pits " + side_a + " against itself");
  }
  friend bool operator==(const MatchRecord&, const MatchRecord&) = default;
};

using MatchLog = std::vector<MatchRecord>;

// Percentage of a's wins over its decided games against b, as
// 100 * wins_a / (wins_a + wins_b). Records between other pairs are ignored.
inline double winning_rate(const MatchLog& records, std::string_view a, std::string_view b) {
  long wins_a = 0;
  long wins_b = 0;
  for (const auto& r : records) {
    const bool ab = r.side_a == a && r.side_b == b;
    const bool ba = r.side_a == b && r.side_b == a;
    if (!ab && !ba) continue;
    if (r.outcome == Outcome::kTie) continue;
    const bool first_won = r.outcome == Outcome::kAWins;
    ((first_won == ab) ? wins_a : wins_b) += 1;
  }
  if (wins_a + wins_b == 0) {
    throw AllTies("no decided match between " + std::string(a) + " and " + std::string(b));
  }
  return 100.0 * static_cast<double>(wins_a) / static_cast<double>(wins_a + wins_b);
}

inline json to_json(const MatchRecord& r) {
  return {{"item", r.item}, {"a", r.side_a}, {"b", r.side_b},
          {"outcome", std::string(to_string(r.outcome))}};
}

inline MatchRecord match_from_json(const json& j) {
  MatchRecord r{j.at("item").get<std::string>(), j.at("a").get<std::string>(),
                j.at("b").get<std::string>(), parse_outcome(j.at("outcome").get<std::string>())};
  r.validate();
  return r;
}

inline void write_match_log(const MatchLog& log, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write match log " + path.string());
  for (const auto& r : log) out << to_json(r).dump() << '\n';
}

inline MatchLog read_match_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read match log " + path.string());
  MatchLog out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(match_from_json(json::parse(line)));
    } catch (const std::exception& e) {
      throw EvalError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace gaar::eval
