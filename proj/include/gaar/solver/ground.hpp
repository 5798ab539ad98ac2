#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gaar/error.hpp"
#include "gaar/fol/formula.hpp"
#include "gaar/fol/signature.hpp"
#include "gaar/solver/sat.hpp"

namespace gaar::solver {

using fol::Connective;
using fol::Formula;
using fol::Term;

// Propositional abstraction of a grounded problem. Variable v (1-based) is
// described by entries[v - 1]; auxiliary entries are definitional variables
// introduced by clausification or selector literals, not ground atoms.
struct GroundClauseSet {
  struct Entry {
    std::string name;
    bool auxiliary = false;
  };
  std::vector<Entry> entries;
  std::vector<Clause> clauses;

  int num_vars() const { return static_cast<int>(entries.size()); }
};

// Negation normal form: only atoms, negated atoms, And, Or and quantifiers.
// Implications and biconditionals are expanded.
inline Formula to_nnf(const Formula& f, bool positive = true) {
  switch (f.connective()) {
    case Connective::kAtom:
      return positive ? f : Formula::negation(f);
    case Connective::kNot:
      return to_nnf(f.child(), !positive);
    case Connective::kAnd:
    case Connective::kOr: {
      std::vector<Formula> parts;
      for (const Formula& c : f.children()) parts.push_back(to_nnf(c, positive));
      const bool conj = (f.connective() == Connective::kAnd) == positive;
      return conj ? Formula::conjunction(std::move(parts))
                  : Formula::disjunction(std::move(parts));
    }
    case Connective::kImplies:
      // a -> b == ~a | b
      if (positive) {
        return Formula::disjunction(
            {to_nnf(f.child(0), false), to_nnf(f.child(1), true)});
      }
      return Formula::conjunction(
          {to_nnf(f.child(0), true), to_nnf(f.child(1), false)});
    case Connective::kIff: {
      const Formula& a = f.child(0);
      const Formula& b = f.child(1);
      if (positive) {
        return Formula::conjunction(
            {Formula::disjunction({to_nnf(a, false), to_nnf(b, true)}),
             Formula::disjunction({to_nnf(a, true), to_nnf(b, false)})});
      }
      return Formula::disjunction(
          {Formula::conjunction({to_nnf(a, true), to_nnf(b, false)}),
           Formula::conjunction({to_nnf(a, false), to_nnf(b, true)})});
    }
    case Connective::kForAll:
    case Connective::kExists: {
      const bool universal = (f.connective() == Connective::kForAll) == positive;
      Formula body = to_nnf(f.child(), positive);
      return universal ? Formula::for_all(f.name(), std::move(body))
                       : Formula::exists(f.name(), std::move(body));
    }
  }
  throw InvalidArgument("unknown connective");
}

// Grounds closed function-free formulas over a finite Herbrand universe and
// clausifies them into a shared atom table.
//
// Accepted fragment: after conversion to NNF, every existential must not
// contain a free occurrence of a universally quantified variable (inner
// Skolemization then only produces constants). Each remaining existential is
// replaced by a fresh Skolem constant that joins the universe; universals are
// expanded over the universe. Disjunctions over complex subformulas get a
// one-sided definitional variable t with clauses (~t | ...).
class Grounder {
 public:
  // `formulas` must contain every formula that will later be grounded, so the
  // universe (constants plus Skolem constants) is complete before expansion.
  explicit Grounder(std::span<const Formula> formulas) {
    fol::Signature sig = fol::signature_of(formulas);
    for (const Formula& f : formulas) {
      if (!fol::is_closed(f)) {
        throw UnsupportedFragment("formula has free variables: " +
                                  *fol::free_variables(f).begin());
      }
    }
    taken_names_ = sig.constants;
    universe_.assign(sig.constants.begin(), sig.constants.end());

    nnf_.reserve(formulas.size());
    for (const Formula& f : formulas) nnf_.push_back(to_nnf(f));
    for (const Formula& f : nnf_) {
      std::vector<std::pair<std::string, bool>> scope;
      assign_skolems(f, scope);
    }
    if (universe_.empty()) {
      universe_.push_back(fresh_name("c0"));
    }
  }

  Grounder(const Grounder&) = delete;
  Grounder& operator=(const Grounder&) = delete;

  // Number of formulas passed to the constructor.
  std::size_t size() const { return nnf_.size(); }

  const std::vector<std::string>& universe() const { return universe_; }
  const GroundClauseSet& clause_set() const { return set_; }
  GroundClauseSet take_clause_set() { return std::move(set_); }

  // Clauses asserting formula i. Clauses are also appended to clause_set()
  // unless `record` is false.
  std::vector<Clause> ground(std::size_t i, bool record = true) {
    Env env;
    std::vector<Clause> out = clauses_of(nnf_.at(i), env);
    if (record) {
      for (const Clause& c : out) set_.clauses.push_back(c);
    }
    return out;
  }

  int new_auxiliary(std::string name) {
    set_.entries.push_back({std::move(name), true});
    return set_.num_vars();
  }

  // Variable id for a ground atom name, allocating it on first use.
  int atom_id(const std::string& name) {
    auto [it, inserted] = atom_ids_.emplace(name, 0);
    if (inserted) {
      set_.entries.push_back({name, false});
      it->second = set_.num_vars();
    }
    return it->second;
  }

 private:
  using Env = std::vector<std::pair<std::string, std::string>>;  // var -> constant

  std::string fresh_name(const std::string& base) {
    std::string name = base;
    while (taken_names_.contains(name)) name += "_";
    taken_names_.insert(name);
    return name;
  }

  void assign_skolems(const Formula& f,
                      std::vector<std::pair<std::string, bool>>& scope) {
    switch (f.connective()) {
      case Connective::kAtom:
      case Connective::kNot:
        return;
      case Connective::kForAll:
      case Connective::kExists: {
        const bool universal = f.connective() == Connective::kForAll;
        if (!universal) {
          for (const auto& var : fol::free_variables(f)) {
            for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
              if (it->first != var) continue;
              if (it->second) {
                throw UnsupportedFragment(
                    "existential " + f.name() +
                    " depends on universally quantified " + var +
                    " (would need a Skolem function)");
              }
              break;
            }
          }
          std::string sk = fresh_name("sk" + std::to_string(skolems_.size()));
          skolems_.emplace(&f, sk);
          universe_.push_back(sk);
        }
        scope.emplace_back(f.name(), universal);
        assign_skolems(f.child(), scope);
        scope.pop_back();
        return;
      }
      default:
        for (const Formula& c : f.children()) assign_skolems(c, scope);
    }
  }

  static const std::string& lookup(const Env& env, const std::string& var) {
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      if (it->first == var) return it->second;
    }
    throw UnsupportedFragment("unbound variable " + var);
  }

  Literal literal(const Formula& atom, const Env& env, bool positive) {
    std::string name = atom.name();
    if (!atom.args().empty()) {
      name += '(';
      for (std::size_t i = 0; i < atom.args().size(); ++i) {
        if (i) name += ", ";
        const Term& t = atom.args()[i];
        name += t.is_variable() ? lookup(env, t.name) : t.name;
      }
      name += ')';
    }
    const int id = atom_id(name);
    return positive ? id : -id;
  }

  std::vector<Clause> clauses_of(const Formula& f, Env& env) {
    switch (f.connective()) {
      case Connective::kAtom:
        return {{literal(f, env, true)}};
      case Connective::kNot:
        return {{literal(f.child(), env, false)}};
      case Connective::kAnd: {
        std::vector<Clause> out;
        for (const Formula& c : f.children()) append(out, clauses_of(c, env));
        return out;
      }
      case Connective::kForAll: {
        std::vector<Clause> out;
        for (const std::string& constant : universe_) {
          env.emplace_back(f.name(), constant);
          append(out, clauses_of(f.child(), env));
          env.pop_back();
        }
        return out;
      }
      case Connective::kExists: {
        env.emplace_back(f.name(), skolems_.at(&f));
        std::vector<Clause> out = clauses_of(f.child(), env);
        env.pop_back();
        return out;
      }
      case Connective::kOr: {
        Clause clause;
        std::vector<Clause> definitions;
        bool satisfied = false;
        add_disjunct(f, env, clause, definitions, satisfied);
        if (satisfied) return {};
        std::vector<Clause> out;
        out.push_back(normalize(std::move(clause), satisfied));
        if (satisfied) out.clear();
        append(out, std::move(definitions));
        return out;
      }
      default:
        throw InvalidArgument("formula is not in negation normal form");
    }
  }

  void add_disjunct(const Formula& f, Env& env, Clause& clause,
                    std::vector<Clause>& definitions, bool& satisfied) {
    switch (f.connective()) {
      case Connective::kAtom:
        clause.push_back(literal(f, env, true));
        return;
      case Connective::kNot:
        clause.push_back(literal(f.child(), env, false));
        return;
      case Connective::kOr:
        for (const Formula& c : f.children()) {
          add_disjunct(c, env, clause, definitions, satisfied);
        }
        return;
      case Connective::kExists:
        env.emplace_back(f.name(), skolems_.at(&f));
        add_disjunct(f.child(), env, clause, definitions, satisfied);
        env.pop_back();
        return;
      default: {
        std::vector<Clause> sub = clauses_of(f, env);
        if (sub.empty()) {
          satisfied = true;
          return;
        }
        if (sub.size() == 1) {
          clause.insert(clause.end(), sub[0].begin(), sub[0].end());
          return;
        }
        const int t = new_auxiliary("$def" + std::to_string(++definitions_));
        clause.push_back(t);
        for (Clause& c : sub) {
          c.push_back(-t);
          definitions.push_back(std::move(c));
        }
      }
    }
  }

  static Clause normalize(Clause c, bool& tautology) {
    std::sort(c.begin(), c.end(), [](Literal a, Literal b) {
      return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b;
    });
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (c[i] == -c[i - 1]) tautology = true;
    }
    return c;
  }

  static void append(std::vector<Clause>& out, std::vector<Clause> more) {
    for (Clause& c : more) out.push_back(std::move(c));
  }

  std::vector<Formula> nnf_;
  std::vector<std::string> universe_;
  std::set<std::string> taken_names_;
  std::map<const Formula*, std::string> skolems_;
  std::map<std::string, int> atom_ids_;
  GroundClauseSet set_;
  int definitions_ = 0;
};

// Grounds and clausifies the conjunction of `formulas`.
inline GroundClauseSet ground(std::span<const Formula> formulas) {
  Grounder g(formulas);
  for (std::size_t i = 0; i < g.size(); ++i) g.ground(i);
  return g.take_clause_set();
}

struct SatVerdict {
  bool satisfiable = false;
  std::map<std::string, bool> model;  // ground atoms only
};

inline SatVerdict sat(const GroundClauseSet& set) {
  SatResult r = solve_cnf(set.num_vars(), set.clauses);
  SatVerdict out;
  out.satisfiable = r.satisfiable;
  if (r.satisfiable) {
    for (int v = 1; v <= set.num_vars(); ++v) {
      const auto& e = set.entries[v - 1];
      if (!e.auxiliary) out.model[e.name] = r.model[v];
    }
  }
  return out;
}

}  // namespace gaar::solver
