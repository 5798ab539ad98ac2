#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gaar/error.hpp"
#include "gaar/fol/formula.hpp"
#include "gaar/fol/signature.hpp"

// Logic syntax accepted by parse_formula (EBNF; operators listed loosest
// first, each Unicode spelling followed by its ASCII alternatives):
//
//   formula    = iff ;
//   iff        = implies { ("↔" | "<->") implies } ;          left-assoc
//   implies    = or [ ("→" | "->") implies ] ;                right-assoc
//   or         = and { ("∨" | "|") and } ;
//   and        = unary { ("∧" | "&") unary } ;
//   unary      = ("¬" | "~" | "!") unary | quantified | primary ;
//   quantified = ("∀" | "forall" | "∃" | "exists") ident { "," ident } [ "." ]
//                ( quantified | "[" formula "]" | "(" formula ")" | formula ) ;
//   primary    = "(" formula ")" | "[" formula "]" | atom ;
//   atom       = ident [ "(" term { "," term } ")" ] ;
//   term       = ident ;
//   ident      = letter { letter | digit | "_" } ;
//
// A quantifier followed directly by a bracket scopes over exactly that
// bracket; otherwise its body extends as far right as possible. A term is a
// variable iff an enclosing quantifier binds its name, else a constant.
// Terms cannot take arguments (no function symbols).

namespace gaar::fol {

namespace detail {

enum class Tok {
  kIdent,
  kLParen,
  kRParen,
  kLBracket,
  kRBracket,
  kComma,
  kDot,
  kNot,
  kAnd,
  kOr,
  kImplies,
  kIff,
  kForAll,
  kExists,
  kEnd,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

inline bool is_ident_start(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_';
}
inline bool is_ident_char(char c) {
  return is_ident_start(c) || (c >= '0' && c <= '9');
}

inline std::vector<Token> tokenize(std::string_view text) {
  struct Spelling {
    std::string_view text;
    Tok kind;
  };
  // Longest spellings first so "<->" wins over "-" prefixes.
  static constexpr Spelling kSymbols[] = {
      {"\xE2\x88\x80", Tok::kForAll},   // ∀
      {"\xE2\x88\x83", Tok::kExists},   // ∃
      {"\xE2\x88\xA7", Tok::kAnd},      // ∧
      {"\xE2\x88\xA8", Tok::kOr},       // ∨
      {"\xE2\x86\x92", Tok::kImplies},  // →
      {"\xE2\x86\x94", Tok::kIff},      // ↔
      {"\xC2\xAC", Tok::kNot},          // ¬
      {"<->", Tok::kIff},
      {"->", Tok::kImplies},
      {"~", Tok::kNot},
      {"!", Tok::kNot},
      {"&", Tok::kAnd},
      {"|", Tok::kOr},
      {"(", Tok::kLParen},
      {")", Tok::kRParen},
      {"[", Tok::kLBracket},
      {"]", Tok::kRBracket},
      {",", Tok::kComma},
      {".", Tok::kDot},
  };

  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      ++i;
      continue;
    }
    if (is_ident_start(c)) {
      std::size_t start = i;
      while (i < text.size() && is_ident_char(text[i])) ++i;
      std::string word(text.substr(start, i - start));
      Tok kind = Tok::kIdent;
      if (word == "forall") kind = Tok::kForAll;
      if (word == "exists") kind = Tok::kExists;
      tokens.push_back({kind, std::move(word), start});
      continue;
    }
    bool matched = false;
    for (const auto& s : kSymbols) {
      if (text.substr(i, s.text.size()) == s.text) {
        tokens.push_back({s.kind, std::string(s.text), i});
        i += s.text.size();
        matched = true;
        break;
      }
    }
    if (!matched) throw SyntaxError("unknown token", i);
  }
  tokens.push_back({Tok::kEnd, "", text.size()});
  return tokens;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  Formula parse() {
    Formula f = parse_iff();
    if (peek().kind != Tok::kEnd) {
      if (peek().kind == Tok::kRParen || peek().kind == Tok::kRBracket) {
        throw SyntaxError("unbalanced closing bracket", peek().offset);
      }
      throw SyntaxError("unexpected token '" + peek().text + "'",
                        peek().offset);
    }
    return f;
  }

 private:
  static constexpr int kMaxDepth = 256;

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p(p) {
      if (++p.depth_ > kMaxDepth) {
        throw SyntaxError("formula nested too deeply", p.peek().offset);
      }
    }
    ~DepthGuard() { --p.depth_; }
    Parser& p;
  };

  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_++]; }
  bool accept(Tok kind) {
    if (peek().kind != kind) return false;
    ++pos_;
    return true;
  }

  Formula parse_iff() {
    DepthGuard guard(*this);
    Formula lhs = parse_implies();
    while (accept(Tok::kIff)) {
      lhs = Formula::iff(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  Formula parse_implies() {
    DepthGuard guard(*this);
    Formula lhs = parse_or();
    if (accept(Tok::kImplies)) {
      return Formula::implies(std::move(lhs), parse_implies());
    }
    return lhs;
  }

  Formula parse_or() {
    std::vector<Formula> parts;
    parts.push_back(parse_and());
    while (accept(Tok::kOr)) parts.push_back(parse_and());
    if (parts.size() == 1) return std::move(parts.front());
    return Formula::disjunction(std::move(parts));
  }

  Formula parse_and() {
    std::vector<Formula> parts;
    parts.push_back(parse_unary());
    while (accept(Tok::kAnd)) parts.push_back(parse_unary());
    if (parts.size() == 1) return std::move(parts.front());
    return Formula::conjunction(std::move(parts));
  }

  Formula parse_unary() {
    DepthGuard guard(*this);
    if (accept(Tok::kNot)) return Formula::negation(parse_unary());
    if (peek().kind == Tok::kForAll || peek().kind == Tok::kExists) {
      return parse_quantified();
    }
    return parse_primary();
  }

  Formula parse_quantified() {
    DepthGuard guard(*this);
    const bool universal = next().kind == Tok::kForAll;
    std::vector<std::string> vars;
    do {
      if (peek().kind != Tok::kIdent) {
        throw SyntaxError("expected variable after quantifier", peek().offset);
      }
      vars.push_back(next().text);
    } while (accept(Tok::kComma));
    accept(Tok::kDot);

    for (const auto& v : vars) bound_.push_back(v);
    Formula body;
    if (peek().kind == Tok::kForAll || peek().kind == Tok::kExists) {
      body = parse_quantified();
    } else if (peek().kind == Tok::kLParen || peek().kind == Tok::kLBracket) {
      body = parse_group();
    } else {
      body = parse_iff();
    }
    bound_.resize(bound_.size() - vars.size());

    for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
      body = universal ? Formula::for_all(*it, std::move(body))
                       : Formula::exists(*it, std::move(body));
    }
    return body;
  }

  Formula parse_group() {
    const Token& open = next();
    const Tok expected = open.kind == Tok::kLParen ? Tok::kRParen
                                                   : Tok::kRBracket;
    Formula inner = parse_iff();
    if (peek().kind != expected) {
      if (peek().kind == Tok::kEnd) {
        throw SyntaxError("unbalanced bracket opened", open.offset);
      }
      throw SyntaxError(std::string("expected '") +
                            (expected == Tok::kRParen ? ")" : "]") + "'",
                        peek().offset);
    }
    ++pos_;
    return inner;
  }

  Formula parse_primary() {
    if (peek().kind == Tok::kLParen || peek().kind == Tok::kLBracket) {
      return parse_group();
    }
    if (peek().kind != Tok::kIdent) {
      if (peek().kind == Tok::kEnd) {
        throw SyntaxError("unexpected end of formula", peek().offset);
      }
      throw SyntaxError("unexpected token '" + peek().text + "'",
                        peek().offset);
    }
    const Token& pred = next();
    std::vector<Term> args;
    if (accept(Tok::kLParen)) {
      do {
        args.push_back(parse_term());
      } while (accept(Tok::kComma));
      if (!accept(Tok::kRParen)) {
        if (peek().kind == Tok::kEnd) {
          throw SyntaxError("unbalanced bracket in argument list",
                            pred.offset);
        }
        throw SyntaxError("expected ')' or ','", peek().offset);
      }
    }
    auto [it, inserted] = arities_.emplace(pred.text, args.size());
    if (!inserted && it->second != args.size()) {
      throw ArityError("predicate " + pred.text + " used with arity " +
                       std::to_string(it->second) + " and " +
                       std::to_string(args.size()));
    }
    return Formula::atom(pred.text, std::move(args));
  }

  Term parse_term() {
    if (peek().kind != Tok::kIdent) {
      throw SyntaxError("expected term", peek().offset);
    }
    const Token& name = next();
    if (peek().kind == Tok::kLParen) {
      throw SyntaxError("function symbols are not supported (" + name.text +
                            ")",
                        peek().offset);
    }
    for (auto it = bound_.rbegin(); it != bound_.rend(); ++it) {
      if (*it == name.text) return Term::variable(name.text);
    }
    return Term::constant(name.text);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  std::vector<std::string> bound_;
  std::map<std::string, std::size_t> arities_;
};

}  // namespace detail

// Parses one sentence in the logic syntax documented above. Throws
// SyntaxError (with byte offset), ArityError, or SymbolClashError.
inline Formula parse_formula(std::string_view text) {
  Formula f = detail::Parser(text).parse();
  signature_of(f);
  return f;
}

}  // namespace gaar::fol
