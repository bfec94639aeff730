#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "litsearch/error.hpp"

namespace litsearch::query {

class Expr;

struct Term {
  std::string word;
  bool wildcard = false;
  friend bool operator==(const Term&, const Term&) = default;
};

struct Phrase {
  std::string text;
  friend bool operator==(const Phrase&, const Phrase&) = default;
};

struct Not {
  std::shared_ptr<const Expr> inner;
  friend bool operator==(const Not& a, const Not& b);
};

struct And {
  std::vector<Expr> children;  // at least two
  friend bool operator==(const And&, const And&) = default;
};

struct Or {
  std::vector<Expr> children;  // at least two, none of them an Or
  friend bool operator==(const Or&, const Or&) = default;
};

// Immutable Boolean query tree. Build through the factory functions, which
// check the node invariants and flatten nested Or nodes.
class Expr {
 public:
  using Node = std::variant<Term, Phrase, Not, And, Or>;

  const Node& node() const noexcept { return node_; }

  template <typename T>
  bool is() const noexcept { return std::holds_alternative<T>(node_); }
  template <typename T>
  const T& as() const { return std::get<T>(node_); }

  friend bool operator==(const Expr&, const Expr&) = default;

  friend Expr term(std::string word, bool wildcard);
  friend Expr phrase(std::string text);
  friend Expr negate(Expr inner);
  friend Expr all_of(std::vector<Expr> children);
  friend Expr any_of(std::vector<Expr> children);

 private:
  explicit Expr(Node node) : node_(std::move(node)) {}
  Node node_;
};

inline bool operator==(const Not& a, const Not& b) { return *a.inner == *b.inner; }

// Throw UsageError on invariant violations.
Expr term(std::string word, bool wildcard = false);
Expr phrase(std::string text);
Expr negate(Expr inner);
Expr all_of(std::vector<Expr> children);
Expr any_of(std::vector<Expr> children);

class SyntaxError : public UsageError {
 public:
  SyntaxError(std::size_t offset, const std::string& message)
      : UsageError("syntax error at offset " + std::to_string(offset) + ": " + message), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// expr := or; or := and ('OR' and)*; and := unary (('AND' | 'NOT') unary)*;
// unary := 'NOT' unary | atom; atom := '(' expr ')' | "phrase" | word['*'].
// Operators are case-insensitive. 'a NOT b' reads as 'a AND NOT b'.
Expr parse(std::string_view text);

enum class Dialect { generic, pubmed, embase, cinahl };

std::string to_string(Dialect d);
Dialect dialect_from_string(std::string_view name);
const std::vector<Dialect>& all_dialects();

// Deterministic rendering. Operators are uppercase; AND operands are always
// parenthesized. The engine dialects render a negated AND operand with the
// engines' infix NOT ("(a) NOT (b)"); generic keeps "(a) AND (NOT b)".
std::string serialize(const Expr& e, Dialect d = Dialect::generic);

// "w1 OR w2 OR ..." from raw terms; a trailing '*' becomes the wildcard flag.
Expr or_of_terms(const std::vector<std::string>& terms);

// (a) AND (b), kept binary.
Expr and_combine(Expr a, Expr b);

}  // namespace litsearch::query
