#pragma once

#include <string>
#include <string_view>

#include "gaar/fol/formula.hpp"

namespace gaar::fol {

enum class Style { kUnicode, kAscii };

namespace detail {

struct Operators {
  std::string_view not_op, and_op, or_op, implies_op, iff_op, forall, exists;
};

inline const Operators& operators(Style style) {
  static const Operators kUnicode{"\xC2\xAC",
                                  " \xE2\x88\xA7 ",
                                  " \xE2\x88\xA8 ",
                                  " \xE2\x86\x92 ",
                                  " \xE2\x86\x94 ",
                                  "\xE2\x88\x80",
                                  "\xE2\x88\x83"};
  static const Operators kAscii{"~",       " & ",     " | ",     " -> ",
                                " <-> ",   "forall ", "exists "};
  return style == Style::kUnicode ? kUnicode : kAscii;
}

inline void render_into(const Formula& f, const Operators& ops,
                        std::string& out);

// Binary connectives nested inside another connective are always
// parenthesized, which keeps the output unambiguous for any precedence.
inline void render_operand(const Formula& f, const Operators& ops,
                           std::string& out) {
  if (f.is_binary()) {
    out += '(';
    render_into(f, ops, out);
    out += ')';
  } else {
    render_into(f, ops, out);
  }
}

inline void render_into(const Formula& f, const Operators& ops,
                        std::string& out) {
  switch (f.connective()) {
    case Connective::kAtom:
      out += f.name();
      if (!f.args().empty()) {
        out += '(';
        for (std::size_t i = 0; i < f.args().size(); ++i) {
          if (i) out += ", ";
          out += f.args()[i].name;
        }
        out += ')';
      }
      return;
    case Connective::kNot:
      out += ops.not_op;
      render_operand(f.child(), ops, out);
      return;
    case Connective::kAnd:
    case Connective::kOr: {
      const auto sep = f.connective() == Connective::kAnd ? ops.and_op
                                                          : ops.or_op;
      for (std::size_t i = 0; i < f.children().size(); ++i) {
        if (i) out += sep;
        render_operand(f.children()[i], ops, out);
      }
      return;
    }
    case Connective::kImplies:
    case Connective::kIff:
      render_operand(f.child(0), ops, out);
      out += f.connective() == Connective::kImplies ? ops.implies_op
                                                     : ops.iff_op;
      render_operand(f.child(1), ops, out);
      return;
    case Connective::kForAll:
    case Connective::kExists: {
      out += f.connective() == Connective::kForAll ? ops.forall : ops.exists;
      out += f.name();
      const Formula& body = f.child();
      if (body.is_quantifier()) {
        // Adjacent quantifiers chain: "∀x∀y [...]" / "forall x forall y [...]".
        if (ops.forall.back() == ' ') out += ' ';
        render_into(body, ops, out);
      } else {
        out += " [";
        render_into(body, ops, out);
        out += ']';
      }
      return;
    }
  }
}

}  // namespace detail

inline std::string render_formula(const Formula& f,
                                  Style style = Style::kUnicode) {
  std::string out;
  detail::render_into(f, detail::operators(style), out);
  return out;
}

}  // namespace gaar::fol
