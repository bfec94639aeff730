#include "litsearch/query.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace litsearch::query {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool breaks_word(char c) { return is_space(c) || c == '(' || c == ')' || c == '"'; }

std::string upper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

bool is_keyword(std::string_view word) {
  std::string u = upper(word);
  return u == "AND" || u == "OR" || u == "NOT";
}

}  // namespace

Expr term(std::string word, bool wildcard) {
  if (word.empty()) throw UsageError("empty search term");
  for (char c : word) {
    if (breaks_word(c) || c == '*') {
      throw UsageError("search term '" + word + "' contains a reserved character");
    }
  }
  if (is_keyword(word)) throw UsageError("search term '" + word + "' collides with an operator");
  return Expr(Term{std::move(word), wildcard});
}

Expr phrase(std::string text) {
  if (text.empty()) throw UsageError("empty phrase");
  if (text.find('"') != std::string::npos) throw UsageError("phrase contains a double quote");
  return Expr(Phrase{std::move(text)});
}

Expr negate(Expr inner) { return Expr(Not{std::make_shared<const Expr>(std::move(inner))}); }

Expr all_of(std::vector<Expr> children) {
  if (children.size() < 2) throw UsageError("AND needs at least two operands");
  return Expr(And{std::move(children)});
}

Expr any_of(std::vector<Expr> children) {
  std::vector<Expr> flat;
  flat.reserve(children.size());
  for (auto& child : children) {
    if (child.is<Or>()) {
      const auto& nested = child.as<Or>().children;
      flat.insert(flat.end(), nested.begin(), nested.end());
    } else {
      flat.push_back(std::move(child));
    }
  }
  if (flat.size() < 2) throw UsageError("OR needs at least two operands");
  return Expr(Or{std::move(flat)});
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct Token {
  enum class Kind { lparen, rparen, phrase, word, op_and, op_or, op_not, end } kind;
  std::size_t offset = 0;
  std::string text;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Token::Kind::lparen: return "'('";
    case Token::Kind::rparen: return "')'";
    case Token::Kind::phrase: return "phrase \"" + t.text + "\"";
    case Token::Kind::word: return "term '" + t.text + "'";
    case Token::Kind::op_and: return "AND";
    case Token::Kind::op_or: return "OR";
    case Token::Kind::op_not: return "NOT";
    case Token::Kind::end: return "end of input";
  }
  return "token";
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (is_space(c)) {
      ++i;
    } else if (c == '(') {
      out.push_back({Token::Kind::lparen, i, "("});
      ++i;
    } else if (c == ')') {
      out.push_back({Token::Kind::rparen, i, ")"});
      ++i;
    } else if (c == '"') {
      auto close = s.find('"', i + 1);
      if (close == std::string_view::npos) throw SyntaxError(i, "unterminated phrase");
      if (close == i + 1) throw SyntaxError(i, "empty phrase");
      out.push_back({Token::Kind::phrase, i, std::string(s.substr(i + 1, close - i - 1))});
      i = close + 1;
    } else {
      std::size_t start = i;
      while (i < s.size() && !breaks_word(s[i])) ++i;
      std::string word(s.substr(start, i - start));
      std::string u = upper(word);
      Token::Kind kind = u == "AND"  ? Token::Kind::op_and
                         : u == "OR" ? Token::Kind::op_or
                         : u == "NOT" ? Token::Kind::op_not
                                      : Token::Kind::word;
      out.push_back({kind, start, std::move(word)});
    }
  }
  out.push_back({Token::Kind::end, s.size(), ""});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  Expr parse_all() {
    Expr e = parse_or();
    if (peek().kind != Token::Kind::end) {
      throw SyntaxError(peek().offset, "unexpected " + describe(peek()) + "; expected AND, OR, NOT or end of input");
    }
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }

  Expr parse_or() {
    std::vector<Expr> parts;
    parts.push_back(parse_and());
    while (peek().kind == Token::Kind::op_or) {
      take();
      parts.push_back(parse_and());
    }
    return parts.size() == 1 ? std::move(parts.front()) : any_of(std::move(parts));
  }

  Expr parse_and() {
    std::vector<Expr> parts;
    parts.push_back(parse_unary());
    for (;;) {
      if (peek().kind == Token::Kind::op_and) {
        take();
        parts.push_back(parse_unary());
      } else if (peek().kind == Token::Kind::op_not) {
        take();
        parts.push_back(negate(parse_unary()));
      } else {
        break;
      }
    }
    return parts.size() == 1 ? std::move(parts.front()) : all_of(std::move(parts));
  }

  Expr parse_unary() {
    if (peek().kind == Token::Kind::op_not) {
      take();
      return negate(parse_unary());
    }
    return parse_atom();
  }

  Expr parse_atom() {
    const Token& t = take();
    switch (t.kind) {
      case Token::Kind::lparen: {
        Expr inner = parse_or();
        if (peek().kind != Token::Kind::rparen) {
          throw SyntaxError(peek().offset, "unexpected " + describe(peek()) + "; expected ')'");
        }
        take();
        return inner;
      }
      case Token::Kind::phrase:
        return phrase(t.text);
      case Token::Kind::word: {
        std::string word = t.text;
        bool wildcard = word.back() == '*';
        if (wildcard) word.pop_back();
        if (auto star = word.find('*'); star != std::string::npos) {
          throw SyntaxError(t.offset + star, "wildcard '*' is only allowed at the end of a term");
        }
        if (word.empty()) throw SyntaxError(t.offset, "wildcard without a stem");
        return term(std::move(word), wildcard);
      }
      default:
        throw SyntaxError(t.offset, "unexpected " + describe(t) + "; expected term, phrase, NOT or '('");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text) { return Parser(lex(text)).parse_all(); }

// ---------------------------------------------------------------------------
// Serialization

std::string to_string(Dialect d) {
  switch (d) {
    case Dialect::generic: return "generic";
    case Dialect::pubmed: return "pubmed";
    case Dialect::embase: return "embase";
    case Dialect::cinahl: return "cinahl";
  }
  return "generic";
}

Dialect dialect_from_string(std::string_view name) {
  for (Dialect d : all_dialects()) {
    if (to_string(d) == name) return d;
  }
  throw UsageError("unknown dialect '" + std::string(name) + "' (expected generic|pubmed|embase|cinahl)");
}

const std::vector<Dialect>& all_dialects() {
  static const std::vector<Dialect> dialects = {Dialect::generic, Dialect::pubmed, Dialect::embase,
                                                Dialect::cinahl};
  return dialects;
}

namespace {

void render(const Expr& e, Dialect d, std::string& out);

void render_grouped(const Expr& e, Dialect d, std::string& out) {
  out += '(';
  render(e, d, out);
  out += ')';
}

void render(const Expr& e, Dialect d, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term>) {
          out += n.word;
          if (n.wildcard) out += '*';
        } else if constexpr (std::is_same_v<T, Phrase>) {
          out += '"';
          out += n.text;
          out += '"';
        } else if constexpr (std::is_same_v<T, Not>) {
          out += "NOT ";
          if (n.inner->template is<And>() || n.inner->template is<Or>()) {
            render_grouped(*n.inner, d, out);
          } else {
            render(*n.inner, d, out);
          }
        } else if constexpr (std::is_same_v<T, And>) {
          const bool infix_not = d != Dialect::generic;
          for (std::size_t i = 0; i < n.children.size(); ++i) {
            const Expr& child = n.children[i];
            if (i > 0 && infix_not && child.template is<Not>()) {
              out += " NOT ";
              render_grouped(*child.template as<Not>().inner, d, out);
              continue;
            }
            if (i > 0) out += " AND ";
            render_grouped(child, d, out);
          }
        } else {
          for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i > 0) out += " OR ";
            render(n.children[i], d, out);
          }
        }
      },
      e.node());
}

}  // namespace

std::string serialize(const Expr& e, Dialect d) {
  std::string out;
  render(e, d, out);
  return out;
}

Expr or_of_terms(const std::vector<std::string>& terms) {
  if (terms.empty()) throw UsageError("or_of_terms needs at least one term");
  std::vector<Expr> parts;
  parts.reserve(terms.size());
  for (const auto& raw : terms) {
    std::string word = raw;
    bool wildcard = !word.empty() && word.back() == '*';
    if (wildcard) word.pop_back();
    parts.push_back(term(std::move(word), wildcard));
  }
  return parts.size() == 1 ? std::move(parts.front()) : any_of(std::move(parts));
}

Expr and_combine(Expr a, Expr b) {
  std::vector<Expr> parts;
  parts.reserve(2);
  parts.push_back(std::move(a));
  parts.push_back(std::move(b));
  return all_of(std::move(parts));
}

}  // namespace litsearch::query
