#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <span>
#include <string>

#include "gaar/error.hpp"
#include "gaar/fol/formula.hpp"

namespace gaar::fol {

struct Signature {
  std::map<std::string, std::size_t> predicates;  // symbol -> arity
  std::set<std::string> constants;

  bool empty() const { return predicates.empty() && constants.empty(); }
  friend bool operator==(const Signature&, const Signature&) = default;
};

namespace detail {

inline void add_predicate(Signature& sig, const std::string& name,
                          std::size_t arity) {
  auto [it, inserted] = sig.predicates.emplace(name, arity);
  if (!inserted && it->second != arity) {
    throw ArityError("predicate " + name + " used with arity " +
                     std::to_string(it->second) + " and " +
                     std::to_string(arity));
  }
}

inline void walk_signature(const Formula& f, Signature& sig,
                           std::set<std::string>& bound_names) {
  if (f.is_atom()) {
    add_predicate(sig, f.name(), f.args().size());
    for (const Term& t : f.args()) {
      if (!t.is_variable()) sig.constants.insert(t.name);
    }
    return;
  }
  if (f.is_quantifier()) bound_names.insert(f.name());
  for (const Formula& c : f.children()) walk_signature(c, sig, bound_names);
}

}  // namespace detail

// Predicates with their arities and every constant symbol of a formula set.
// Throws ArityError on conflicting arities and SymbolClashError when a name
// is both quantified somewhere and used as a constant elsewhere.
inline Signature signature_of(std::span<const Formula> formulas) {
  Signature sig;
  std::set<std::string> bound_names;
  for (const Formula& f : formulas) {
    detail::walk_signature(f, sig, bound_names);
  }
  for (const auto& name : bound_names) {
    if (sig.constants.contains(name)) {
      throw SymbolClashError("name " + name +
                             " is used both as a variable and a constant");
    }
  }
  return sig;
}

inline Signature signature_of(const Formula& f) {
  return signature_of(std::span<const Formula>(&f, 1));
}

}  // namespace gaar::fol
