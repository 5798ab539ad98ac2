#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gaar/error.hpp"
#include "gaar/fol/signature.hpp"

namespace gaar::fol {

// One "SYM = phrase" or "SYM(x, y) = phrase" line of a formalization.
struct KeyEntry {
  std::string symbol;
  std::vector<std::string> params;  // empty for constants and nullary predicates
  std::string phrase;

  friend bool operator==(const KeyEntry&, const KeyEntry&) = default;
};

// Natural-language glossary for the symbols of a formula set, in the order
// the entries were given.
class SymbolKeys {
 public:
  SymbolKeys() = default;
  explicit SymbolKeys(std::vector<KeyEntry> entries) {
    for (auto& e : entries) add(std::move(e));
  }

  void add(KeyEntry entry) {
    if (entry.symbol.empty()) throw InvalidArgument("key with empty symbol");
    if (entry.phrase.empty()) {
      throw InvalidArgument("key " + entry.symbol + " has an empty phrase");
    }
    if (find(entry.symbol) != nullptr) {
      throw InvalidArgument("symbol " + entry.symbol + " is keyed twice");
    }
    entries_.push_back(std::move(entry));
  }

  const KeyEntry* find(const std::string& symbol) const {
    for (const auto& e : entries_) {
      if (e.symbol == symbol) return &e;
    }
    return nullptr;
  }

  const std::vector<KeyEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  friend bool operator==(const SymbolKeys&, const SymbolKeys&) = default;

 private:
  std::vector<KeyEntry> entries_;
};

// Symbols of `sig` without a key: predicates first, then constants, each in
// name order.
inline std::vector<std::string> missing_keys(const SymbolKeys& keys,
                                             const Signature& sig) {
  std::vector<std::string> out;
  for (const auto& [name, arity] : sig.predicates) {
    if (keys.find(name) == nullptr) out.push_back(name);
  }
  for (const auto& name : sig.constants) {
    if (keys.find(name) == nullptr) out.push_back(name);
  }
  return out;
}

inline std::string render_key(const KeyEntry& e) {
  std::string out = e.symbol;
  if (!e.params.empty()) {
    out += '(';
    for (std::size_t i = 0; i < e.params.size(); ++i) {
      if (i > 0) out += ", ";
      out += e.params[i];
    }
    out += ')';
  }
  return out + " = " + e.phrase;
}

inline std::string render_keys(const SymbolKeys& keys) {
  std::string out;
  for (const auto& e : keys.entries()) {
    if (!out.empty()) out += '\n';
    out += render_key(e);
  }
  return out;
}

}  // namespace gaar::fol
