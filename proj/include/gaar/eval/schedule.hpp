#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gaar/error.hpp"
#include "gaar/eval/match.hpp"
#include "gaar/llm/backend.hpp"
#include "gaar/llm/pairwise.hpp"
#include "gaar/llm/parsers.hpp"
#include "gaar/llm/template.hpp"
#include "gaar/log.hpp"
#include "gaar/pipeline/types.hpp"

namespace gaar::eval {

// Judges one item: which of the two methods' reconstructions is more
// faithful.
using Judge =
    std::function<Outcome(const std::string& item, const std::string& a, const std::string& b)>;

struct LeagueOptions {
  // Judge every pair a second time with the sides swapped; disagreeing
  // verdicts become ties.
  bool swap_sides = false;
};

namespace detail {

inline Outcome flip(Outcome o) {
  if (o == Outcome::kAWins) return Outcome::kBWins;
  if (o == Outcome::kBWins) return Outcome::kAWins;
  return Outcome::kTie;
}

inline Outcome judge_pair(const Judge& judge, const std::string& item, const std::string& a,
                          const std::string& b, bool swap_sides) {
  const Outcome first = judge(item, a, b);
  if (!swap_sides) return first;
  const Outcome second = flip(judge(item, b, a));
  return first == second ? first : Outcome::kTie;
}

}  // namespace detail

// Every unordered pair of methods on every item, pairs in input order.
inline MatchLog run_league(const std::vector<std::string>& methods,
                           const std::vector<std::string>& items, const Judge& judge,
                           const LeagueOptions& opt = {}) {
  if (std::set<std::string>(methods.begin(), methods.end()).size() != methods.size()) {
    throw InvalidArgument("league has duplicate methods");
  }
  MatchLog log;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    for (std::size_t j = i + 1; j < methods.size(); ++j) {
      for (const auto& item : items) {
        log.push_back(
            {item, methods[i], methods[j],
             detail::judge_pair(judge, item, methods[i], methods[j], opt.swap_sides)});
      }
    }
  }
  return log;
}

// ---- tournaments --------------------------------------------------------------

// A bracket entrant: a named method or the winner of an earlier match.
struct Slot {
  std::string method;
  std::optional<std::size_t> winner_of;

  static Slot of(std::string m) { return {std::move(m), std::nullopt}; }
  static Slot winner(std::size_t match) { return {"", match}; }
};

struct BracketMatch {
  std::size_t round = 1;
  Slot a;
  Slot b;
};

struct Bracket {
  std::vector<BracketMatch> matches;  // the last match is the final
  // Per-method cost, used to break an exact 50:50 result.
  std::map<std::string, double> cost;
};

struct MatchResult {
  std::size_t round = 1;
  std::string a;
  std::string b;
  std::string winner;
  std::optional<double> rate_a;  // a's winning rate, absent when every game tied
  bool tie_break = false;
};

struct TournamentResult {
  MatchLog log;
  std::vector<MatchResult> matches;
  std::string winner;
};

inline void validate_bracket(const Bracket& b) {
  if (b.matches.empty()) throw MalformedBracket("bracket has no matches");
  std::set<std::size_t> used;
  for (std::size_t i = 0; i < b.matches.size(); ++i) {
    for (const Slot* s : {&b.matches[i].a, &b.matches[i].b}) {
      if (s->winner_of) {
        if (*s->winner_of >= i) {
          throw MalformedBracket("match " + std::to_string(i) + " uses the winner of match " +
                                 std::to_string(*s->winner_of) + ", which is not earlier");
        }
        if (!used.insert(*s->winner_of).second) {
          throw MalformedBracket("winner of match " + std::to_string(*s->winner_of) +
                                 " advances twice");
        }
      } else if (s->method.empty()) {
        throw MalformedBracket("match " + std::to_string(i) + " has an empty slot");
      }
    }
    if (i > 0 && b.matches[i].round < b.matches[i - 1].round) {
      throw MalformedBracket("matches must be listed in round order");
    }
  }
  for (std::size_t i = 0; i + 1 < b.matches.size(); ++i) {
    if (!used.contains(i)) {
      throw MalformedBracket("winner of match " + std::to_string(i) + " never plays again");
    }
  }
}

// Plays the bracket in order. A match goes to the side with the higher
// winning rate over the items; an exact 50:50 (or all ties) goes to the
// cheaper method.
inline TournamentResult run_tournament(const Bracket& bracket,
                                       const std::vector<std::string>& items,
                                       const Judge& judge, const LeagueOptions& opt = {}) {
  validate_bracket(bracket);
  TournamentResult out;
  for (const auto& m : bracket.matches) {
    auto name = [&](const Slot& s) { return s.winner_of ? out.matches[*s.winner_of].winner : s.method; };
    MatchResult r{m.round, name(m.a), name(m.b), "", std::nullopt, false};
    if (r.a == r.b) throw MalformedBracket("match pits " + r.a + " against itself");
    MatchLog games;
    for (const auto& item : items) {
      games.push_back({item, r.a, r.b, detail::judge_pair(judge, item, r.a, r.b, opt.swap_sides)});
    }
    try {
      r.rate_a = winning_rate(games, r.a, r.b);
    } catch (const AllTies&) {
    }
    if (r.rate_a && *r.rate_a != 50.0) {
      r.winner = *r.rate_a > 50.0 ? r.a : r.b;
    } else {
      r.tie_break = true;
      auto ca = bracket.cost.find(r.a);
      auto cb = bracket.cost.find(r.b);
      if (ca == bracket.cost.end() || cb == bracket.cost.end()) {
        throw MalformedBracket("50:50 match " + r.a + " vs " + r.b + " needs both costs");
      }
      if (ca->second == cb->second) log::warn("tie-break between equal costs; " + r.a + " advances");
      r.winner = cb->second < ca->second ? r.b : r.a;
    }
    out.log.insert(out.log.end(), games.begin(), games.end());
    out.matches.push_back(std::move(r));
  }
  out.winner = out.matches.back().winner;
  return out;
}

// {"cost": {"m": 0.2, ...}, "matches": [{"round": 1, "a": "m", "b": "#0"}, ...]}
// where "#k" names the winner of match k.
inline Bracket parse_bracket(const json& j) {
  Bracket b;
  try {
    if (j.contains("cost")) {
      for (const auto& [k, v] : j.at("cost").items()) b.cost[k] = v.get<double>();
    }
    for (const auto& m : j.at("matches")) {
      auto slot = [](const std::string& s) {
        if (!s.empty() && s[0] == '#') {
          std::size_t pos = 0;
          const std::size_t k = std::stoul(s.substr(1), &pos);
          if (pos + 1 != s.size()) throw MalformedBracket("bad match reference " + s);
          return Slot::winner(k);
        }
        return Slot::of(s);
      };
      b.matches.push_back({m.value("round", std::size_t{1}), slot(m.at("a").get<std::string>()),
                           slot(m.at("b").get<std::string>())});
    }
  } catch (const MalformedBracket&) {
    throw;
  } catch (const std::exception& e) {
    throw MalformedBracket(std::string("malformed bracket: ") + e.what());
  }
  validate_bracket(b);
  return b;
}

// ---- LLM judge ----------------------------------------------------------------

inline std::string render_for_judge(const pipeline::Reconstruction& r) {
  std::string out;
  for (const auto& p : r.premises) out += p.label + ": " + p.text + "\n";
  return out + "Conclusion: " + r.conclusion + "\n";
}

// Judges with the pairwise prompt. `recons[method][item]` holds each
// method's reconstruction of each item.
struct PairwiseJudge {
  llm::Backend& backend;
  const llm::PromptTemplate& prompt;
  std::map<std::string, pipeline::ArgumentInput> inputs;
  std::map<std::string, std::map<std::string, pipeline::Reconstruction>> recons;
  std::string model = "default";
  double temperature = 0.0;

  Outcome operator()(const std::string& item, const std::string& a, const std::string& b) const {
    auto find = [&](const std::string& method) -> const pipeline::Reconstruction& {
      auto m = recons.find(method);
      if (m == recons.end()) throw EvalError("no reconstructions for method " + method);
      auto r = m->second.find(item);
      if (r == m->second.end()) throw EvalError(method + " has no reconstruction of " + item);
      return r->second;
    };
    auto in = inputs.find(item);
    if (in == inputs.end()) throw EvalError("unknown item " + item);
    llm::CompletionRequest req;
    req.model = model;
    req.template_name = prompt.name;
    req.bindings = {{"TOPIC", in->second.topic},
                    {"ARGUMENT", in->second.argument},
                    {"RECONSTRUCTION_A", render_for_judge(find(a))},
                    {"RECONSTRUCTION_B", render_for_judge(find(b))}};
    req.prompt = llm::render_prompt(prompt, req.bindings);
    req.decoding.temperature = temperature;
    const auto judgment = llm::parse_pairwise_judgment(backend.complete(req).text);
    switch (judgment.overall) {
      case llm::Side::kA: return Outcome::kAWins;
      case llm::Side::kB: return Outcome::kBWins;
      case llm::Side::kTie: return Outcome::kTie;
    }
    return Outcome::kTie;
  }
};

}  // namespace gaar::eval
