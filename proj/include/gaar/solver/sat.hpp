#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <vector>

#include "gaar/error.hpp"

namespace gaar::solver {

// Literals are nonzero ints in DIMACS convention: +v / -v for v in 1..n.
using Literal = int;
using Clause = std::vector<Literal>;

struct SatResult {
  bool satisfiable = false;
  // model[v] for v in 1..num_vars; index 0 unused. Empty when unsatisfiable.
  std::vector<bool> model;
};

// Complete DPLL search: two-watched-literal unit propagation, static
// occurrence-count branching, negative phase first, chronological
// backtracking. Deterministic for a given clause order. Supports solving
// under assumptions so one clause database can answer many related queries.
class SatSolver {
 public:
  explicit SatSolver(int num_vars)
      : num_vars_(num_vars),
        watches_(2 * static_cast<std::size_t>(num_vars) + 2),
        occurrences_(static_cast<std::size_t>(num_vars) + 1, 0) {
    if (num_vars < 0) throw InvalidArgument("negative variable count");
  }

  int num_vars() const { return num_vars_; }

  void add_clause(std::span<const Literal> lits) {
    Clause c(lits.begin(), lits.end());
    for (Literal l : c) check_literal(l);
    std::sort(c.begin(), c.end(), [](Literal a, Literal b) {
      return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b;
    });
    c.erase(std::unique(c.begin(), c.end()), c.end());
    for (std::size_t i = 1; i < c.size(); ++i) {
      if (c[i] == -c[i - 1]) return;  // tautology
    }
    if (c.empty()) {
      has_empty_clause_ = true;
      return;
    }
    for (Literal l : c) ++occurrences_[std::abs(l)];
    order_dirty_ = true;
    if (c.size() == 1) {
      units_.push_back(c[0]);
      return;
    }
    const auto index = static_cast<int>(clauses_.size());
    clauses_.push_back(std::move(c));
    watch(clauses_.back()[0], index);
    watch(clauses_.back()[1], index);
  }

  void add_clause(std::initializer_list<Literal> lits) {
    add_clause(std::span<const Literal>(lits.begin(), lits.size()));
  }

  SatResult solve(std::span<const Literal> assumptions = {}) {
    if (has_empty_clause_) return {};
    for (Literal l : assumptions) check_literal(l);
    reset();
    if (order_dirty_) rebuild_order();

    for (Literal l : units_) {
      if (!enqueue(l)) return {};
    }
    for (Literal l : assumptions) {
      if (!enqueue(l)) return {};
    }
    if (!propagate()) return {};

    std::size_t next_in_order = 0;
    while (true) {
      // Pick the next unassigned variable.
      while (next_in_order < order_.size() &&
             value_[order_[next_in_order]] != kUnassigned) {
        ++next_in_order;
      }
      if (next_in_order == order_.size()) break;
      const int var = order_[next_in_order];
      decisions_.push_back({trail_.size(), false, next_in_order});
      enqueue(-var);

      while (!propagate()) {
        // Flip the most recent unflipped decision; fail if none remain.
        while (!decisions_.empty() && decisions_.back().flipped) {
          decisions_.pop_back();
        }
        if (decisions_.empty()) return {};
        Decision& d = decisions_.back();
        const Literal decided = trail_[d.trail_index];
        undo_to(d.trail_index);
        d.flipped = true;
        next_in_order = d.order_index;
        enqueue(-decided);
      }
    }
    SatResult result;
    result.satisfiable = true;
    result.model.assign(static_cast<std::size_t>(num_vars_) + 1, false);
    for (int v = 1; v <= num_vars_; ++v) result.model[v] = value_[v] == kTrue;
    return result;
  }

 private:
  static constexpr std::int8_t kUnassigned = -1;
  static constexpr std::int8_t kFalse = 0;
  static constexpr std::int8_t kTrue = 1;

  struct Decision {
    std::size_t trail_index;
    bool flipped;
    std::size_t order_index;
  };

  void check_literal(Literal l) const {
    if (l == 0 || std::abs(l) > num_vars_) {
      throw InvalidArgument("literal out of range");
    }
  }

  std::size_t watch_slot(Literal l) const {
    return 2 * static_cast<std::size_t>(std::abs(l)) + (l < 0 ? 1 : 0);
  }
  void watch(Literal l, int clause) { watches_[watch_slot(l)].push_back(clause); }

  std::int8_t lit_value(Literal l) const {
    const std::int8_t v = value_[std::abs(l)];
    if (v == kUnassigned) return kUnassigned;
    return (l > 0) == (v == kTrue) ? kTrue : kFalse;
  }

  void reset() {
    value_.assign(static_cast<std::size_t>(num_vars_) + 1, kUnassigned);
    trail_.clear();
    decisions_.clear();
    propagated_ = 0;
  }

  void rebuild_order() {
    order_.clear();
    for (int v = 1; v <= num_vars_; ++v) order_.push_back(v);
    std::stable_sort(order_.begin(), order_.end(), [&](int a, int b) {
      return occurrences_[a] > occurrences_[b];
    });
    order_dirty_ = false;
  }

  bool enqueue(Literal l) {
    const std::int8_t v = lit_value(l);
    if (v == kFalse) return false;
    if (v == kTrue) return true;
    value_[std::abs(l)] = l > 0 ? kTrue : kFalse;
    trail_.push_back(l);
    return true;
  }

  void undo_to(std::size_t trail_size) {
    while (trail_.size() > trail_size) {
      value_[std::abs(trail_.back())] = kUnassigned;
      trail_.pop_back();
    }
    propagated_ = std::min(propagated_, trail_size);
  }

  // Returns false on conflict.
  bool propagate() {
    while (propagated_ < trail_.size()) {
      const Literal assigned = trail_[propagated_++];
      const Literal falsified = -assigned;
      auto& list = watches_[watch_slot(falsified)];
      std::size_t keep = 0;
      for (std::size_t i = 0; i < list.size(); ++i) {
        const int ci = list[i];
        Clause& c = clauses_[ci];
        if (c[0] == falsified) std::swap(c[0], c[1]);
        // Now c[1] == falsified.
        if (lit_value(c[0]) == kTrue) {
          list[keep++] = ci;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < c.size(); ++k) {
          if (lit_value(c[k]) != kFalse) {
            std::swap(c[1], c[k]);
            watch(c[1], ci);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        list[keep++] = ci;
        if (!enqueue(c[0])) {
          for (std::size_t j = i + 1; j < list.size(); ++j) {
            list[keep++] = list[j];
          }
          list.resize(keep);
          return false;
        }
      }
      list.resize(keep);
    }
    return true;
  }

  int num_vars_;
  std::vector<Clause> clauses_;
  std::vector<Literal> units_;
  std::vector<std::vector<int>> watches_;
  std::vector<int> occurrences_;
  std::vector<int> order_;
  bool order_dirty_ = true;
  bool has_empty_clause_ = false;

  std::vector<std::int8_t> value_;
  std::vector<Literal> trail_;
  std::vector<Decision> decisions_;
  std::size_t propagated_ = 0;
};

// Convenience wrapper for a one-shot satisfiability check.
inline SatResult solve_cnf(int num_vars, std::span<const Clause> clauses) {
  SatSolver solver(num_vars);
  for (const Clause& c : clauses) solver.add_clause(c);
  return solver.solve();
}

}  // namespace gaar::solver
