#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gaar/error.hpp"

namespace gaar::fol {

struct Term {
  enum class Kind { kConstant, kVariable };

  Kind kind = Kind::kConstant;
  std::string name;

  static Term constant(std::string name) {
    return Term{Kind::kConstant, std::move(name)};
  }
  static Term variable(std::string name) {
    return Term{Kind::kVariable, std::move(name)};
  }

  bool is_variable() const { return kind == Kind::kVariable; }

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

enum class Connective {
  kAtom,
  kNot,
  kAnd,
  kOr,
  kImplies,
  kIff,
  kForAll,
  kExists,
};

// Closed first-order sentence without function symbols or equality.
//
// One node type covers every connective:
//   kAtom             name = predicate, args = terms, children empty
//   kNot              one child
//   kAnd / kOr        two or more children
//   kImplies / kIff   exactly two children (antecedent first)
//   kForAll / kExists name = bound variable, one child
class Formula {
 public:
  Formula() = default;

  static Formula atom(std::string predicate, std::vector<Term> args = {}) {
    Formula f(Connective::kAtom);
    f.name_ = std::move(predicate);
    f.args_ = std::move(args);
    return f;
  }
  static Formula negation(Formula operand) {
    Formula f(Connective::kNot);
    f.children_.push_back(std::move(operand));
    return f;
  }
  static Formula conjunction(std::vector<Formula> parts) {
    return nary(Connective::kAnd, std::move(parts));
  }
  static Formula disjunction(std::vector<Formula> parts) {
    return nary(Connective::kOr, std::move(parts));
  }
  static Formula implies(Formula antecedent, Formula consequent) {
    Formula f(Connective::kImplies);
    f.children_.push_back(std::move(antecedent));
    f.children_.push_back(std::move(consequent));
    return f;
  }
  static Formula iff(Formula lhs, Formula rhs) {
    Formula f(Connective::kIff);
    f.children_.push_back(std::move(lhs));
    f.children_.push_back(std::move(rhs));
    return f;
  }
  static Formula for_all(std::string var, Formula body) {
    return quantifier(Connective::kForAll, std::move(var), std::move(body));
  }
  static Formula exists(std::string var, Formula body) {
    return quantifier(Connective::kExists, std::move(var), std::move(body));
  }

  Connective connective() const { return connective_; }
  // Predicate name for atoms, bound variable for quantifiers.
  const std::string& name() const { return name_; }
  const std::vector<Term>& args() const { return args_; }
  const std::vector<Formula>& children() const { return children_; }
  const Formula& child(std::size_t i = 0) const { return children_.at(i); }

  bool is_atom() const { return connective_ == Connective::kAtom; }
  bool is_quantifier() const {
    return connective_ == Connective::kForAll ||
           connective_ == Connective::kExists;
  }
  bool is_binary() const {
    return connective_ == Connective::kAnd || connective_ == Connective::kOr ||
           connective_ == Connective::kImplies ||
           connective_ == Connective::kIff;
  }

  friend bool operator==(const Formula&, const Formula&) = default;

 private:
  explicit Formula(Connective c) : connective_(c) {}

  static Formula nary(Connective c, std::vector<Formula> parts) {
    if (parts.size() < 2) {
      throw InvalidArgument("conjunction/disjunction needs at least two parts");
    }
    Formula f(c);
    f.children_ = std::move(parts);
    return f;
  }
  static Formula quantifier(Connective c, std::string var, Formula body) {
    if (var.empty()) throw InvalidArgument("empty quantifier variable");
    Formula f(c);
    f.name_ = std::move(var);
    f.children_.push_back(std::move(body));
    return f;
  }

  Connective connective_ = Connective::kAtom;
  std::string name_;
  std::vector<Term> args_;
  std::vector<Formula> children_;
};

namespace detail {

inline void collect_free(const Formula& f, std::vector<std::string>& bound,
                         std::set<std::string>& out) {
  switch (f.connective()) {
    case Connective::kAtom:
      for (const Term& t : f.args()) {
        if (!t.is_variable()) continue;
        bool is_bound = false;
        for (const auto& b : bound) is_bound = is_bound || b == t.name;
        if (!is_bound) out.insert(t.name);
      }
      return;
    case Connective::kForAll:
    case Connective::kExists:
      bound.push_back(f.name());
      collect_free(f.child(), bound, out);
      bound.pop_back();
      return;
    default:
      for (const Formula& c : f.children()) collect_free(c, bound, out);
  }
}

}  // namespace detail

inline std::set<std::string> free_variables(const Formula& f) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  detail::collect_free(f, bound, out);
  return out;
}

inline bool is_closed(const Formula& f) { return free_variables(f).empty(); }

}  // namespace gaar::fol
