#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gaar/error.hpp"
#include "gaar/fol/formula.hpp"
#include "gaar/solver/ground.hpp"
#include "gaar/solver/sat.hpp"

namespace gaar::solver {

struct LabeledPremise {
  std::string label;
  Formula formula;

  friend bool operator==(const LabeledPremise&, const LabeledPremise&) = default;
};

using LabeledPremises = std::vector<LabeledPremise>;

struct ValidityVerdict {
  enum class Status { kValid, kInvalid };

  Status status = Status::kInvalid;
  // Present iff Invalid: truth value of every ground atom of the problem in a
  // Herbrand model of the premises and the negated conclusion.
  std::optional<std::map<std::string, bool>> countermodel;

  bool valid() const { return status == Status::kValid; }
};

struct MinimalSetsResult {
  std::vector<std::vector<std::string>> minimal_sets;
  // Labels occurring in some minimal set, in premise order.
  std::vector<std::string> union_labels;
  // False only when the premise count exceeded the cap and the single-set
  // deletion fallback ran instead of full enumeration.
  bool exact = true;
};

struct MinimalSetsOptions {
  std::size_t cap = 16;
  bool allow_fallback = false;
};

// A premises/conclusion problem grounded once, answering entailment queries
// for any subset of the premises. Each premise's clauses are guarded by a
// selector literal, so a subset query is one SAT call under assumptions.
class EntailmentProblem {
 public:
  EntailmentProblem(const LabeledPremises& premises, const Formula& conclusion)
      : premises_(premises) {
    std::set<std::string> labels;
    for (const auto& p : premises) {
      if (p.label.empty() || !labels.insert(p.label).second) {
        throw InvalidArgument("premise labels must be unique and nonempty: '" +
                              p.label + "'");
      }
    }
    std::vector<Formula> formulas;
    formulas.reserve(premises.size() + 1);
    for (const auto& p : premises) formulas.push_back(p.formula);
    formulas.push_back(Formula::negation(conclusion));

    Grounder grounder(formulas);
    std::vector<std::vector<Clause>> groups;
    for (std::size_t i = 0; i < formulas.size(); ++i) {
      groups.push_back(grounder.ground(i, /*record=*/false));
    }
    for (const auto& p : premises) {
      selectors_.push_back(grounder.new_auxiliary("$select:" + p.label));
    }
    clauses_ = grounder.take_clause_set();
    for (std::size_t i = 0; i < premises.size(); ++i) {
      for (Clause c : groups[i]) {
        c.push_back(-selectors_[i]);
        clauses_.clauses.push_back(std::move(c));
      }
    }
    for (const Clause& c : groups.back()) clauses_.clauses.push_back(c);

    solver_.emplace(clauses_.num_vars());
    for (const Clause& c : clauses_.clauses) solver_->add_clause(c);
  }

  std::size_t size() const { return premises_.size(); }
  const LabeledPremises& premises() const { return premises_; }
  const GroundClauseSet& clause_set() const { return clauses_; }

  // Satisfiability of {premises selected by `mask`} + ~conclusion.
  SatResult solve_subset(const std::vector<bool>& mask) {
    std::vector<Literal> assumptions;
    assumptions.reserve(selectors_.size());
    for (std::size_t i = 0; i < selectors_.size(); ++i) {
      assumptions.push_back(mask.at(i) ? selectors_[i] : -selectors_[i]);
    }
    return solver_->solve(assumptions);
  }

  bool entails(const std::vector<bool>& mask) {
    return !solve_subset(mask).satisfiable;
  }

  bool entails(std::uint64_t bits) {
    std::vector<bool> mask(size());
    for (std::size_t i = 0; i < size(); ++i) mask[i] = (bits >> i) & 1u;
    return entails(mask);
  }

  ValidityVerdict verdict() {
    SatResult r = solve_subset(std::vector<bool>(size(), true));
    ValidityVerdict v;
    if (!r.satisfiable) {
      v.status = ValidityVerdict::Status::kValid;
      return v;
    }
    v.status = ValidityVerdict::Status::kInvalid;
    std::map<std::string, bool> model;
    for (int var = 1; var <= clauses_.num_vars(); ++var) {
      const auto& e = clauses_.entries[var - 1];
      if (!e.auxiliary) model[e.name] = r.model[var];
    }
    v.countermodel = std::move(model);
    return v;
  }

 private:
  LabeledPremises premises_;
  std::vector<Literal> selectors_;
  GroundClauseSet clauses_;
  std::optional<SatSolver> solver_;
};

// Do the premises deductively imply the conclusion? Decided by refuting
// premises + ~conclusion over the Herbrand universe of the problem.
inline ValidityVerdict check_validity(const LabeledPremises& premises,
                                      const Formula& conclusion) {
  EntailmentProblem problem(premises, conclusion);
  return problem.verdict();
}

namespace detail {

inline std::vector<std::string> labels_of(const LabeledPremises& premises,
                                          std::uint64_t bits) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < premises.size(); ++i) {
    if ((bits >> i) & 1u) out.push_back(premises[i].label);
  }
  return out;
}

// Calls fn(bits) for every k-subset of {0..n-1} in lexicographic order of
// index tuples. Stops early when fn returns false.
template <typename Fn>
bool for_each_combination(std::size_t n, std::size_t k, Fn&& fn) {
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    std::uint64_t bits = 0;
    for (std::size_t i : idx) bits |= std::uint64_t{1} << i;
    if (!fn(bits)) return false;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace detail

// All minimal premise subsets that entail the conclusion, and their union.
//
// Subsets are visited by increasing size (the empty set included); a subset
// containing an already-found minimal set is skipped without a solver call.
// Above `cap` premises, either CapExceeded is thrown or, with allow_fallback,
// one minimal set is computed by deletion and `exact` is false.
inline MinimalSetsResult minimal_premise_sets(const LabeledPremises& premises,
                                              const Formula& conclusion,
                                              MinimalSetsOptions options = {}) {
  EntailmentProblem problem(premises, conclusion);
  const std::size_t n = premises.size();
  std::vector<bool> all(n, true);
  if (!problem.entails(all)) {
    throw NotValid("premises do not entail the conclusion");
  }

  MinimalSetsResult result;
  std::vector<bool> in_union(n, false);

  if (n > options.cap || n > 63) {
    if (!options.allow_fallback) {
      throw CapExceeded(std::to_string(n) + " premises exceed the cap of " +
                        std::to_string(options.cap));
    }
    std::vector<bool> kept = all;
    for (std::size_t i = 0; i < n; ++i) {
      kept[i] = false;
      if (!problem.entails(kept)) kept[i] = true;
    }
    std::vector<std::string> set;
    for (std::size_t i = 0; i < n; ++i) {
      if (kept[i]) {
        set.push_back(premises[i].label);
        in_union[i] = true;
      }
    }
    result.minimal_sets.push_back(std::move(set));
    result.exact = false;
  } else {
    std::vector<std::uint64_t> found;
    for (std::size_t k = 0; k <= n; ++k) {
      detail::for_each_combination(n, k, [&](std::uint64_t bits) {
        for (std::uint64_t m : found) {
          if ((bits & m) == m) return true;
        }
        if (problem.entails(bits)) {
          found.push_back(bits);
          result.minimal_sets.push_back(detail::labels_of(premises, bits));
          for (std::size_t i = 0; i < n; ++i) {
            if ((bits >> i) & 1u) in_union[i] = true;
          }
        }
        return true;
      });
      // Once the empty set is valid nothing else can be minimal.
      if (!found.empty() && found.front() == 0) break;
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (in_union[i]) result.union_labels.push_back(premises[i].label);
  }
  return result;
}

// Premises that occur in at least one minimal valid subset, original order.
inline LabeledPremises prune(const LabeledPremises& premises,
                             const Formula& conclusion,
                             MinimalSetsOptions options = {}) {
  MinimalSetsResult sets = minimal_premise_sets(premises, conclusion, options);
  std::set<std::string> keep(sets.union_labels.begin(),
                             sets.union_labels.end());
  LabeledPremises out;
  for (const auto& p : premises) {
    if (keep.contains(p.label)) out.push_back(p);
  }
  return out;
}

}  // namespace gaar::solver
