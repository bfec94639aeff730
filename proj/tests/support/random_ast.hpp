#pragma once

#include <random>
#include <string>
#include <vector>

#include "litsearch/query.hpp"

namespace litsearch::testing {

// Random Boolean trees up to `depth` levels, built through the public
// factories so every node invariant holds.
class AstGenerator {
 public:
  explicit AstGenerator(std::uint64_t seed) : rng_(seed) {}

  query::Expr make(int depth) {
    if (depth <= 1 || pick(0, 3) == 0) return leaf();
    switch (pick(0, 2)) {
      case 0: return query::negate(make(depth - 1));
      case 1: return query::all_of(children(depth));
      default: return query::any_of(children(depth));
    }
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::vector<query::Expr> children(int depth) {
    std::vector<query::Expr> out;
    for (int n = pick(2, 4); n > 0; --n) out.push_back(make(depth - 1));
    return out;
  }

  std::string word() {
    static const char* stems[] = {"cancer", "crowdsourc", "tumor", "cell", "pathology", "mol",
                                  "oncol", "x", "pre-op", "covid19", "and_or", "ORx", "nota"};
    std::string w = stems[pick(0, static_cast<int>(std::size(stems)) - 1)];
    if (pick(0, 2) == 0) w += std::to_string(pick(0, 99));
    return w;
  }

  query::Expr leaf() {
    if (pick(0, 2) == 0) {
      std::string text = word();
      for (int n = pick(1, 3); n > 0; --n) text += " " + word();
      return query::phrase(text);
    }
    return query::term(word(), pick(0, 1) == 1);
  }

  std::mt19937_64 rng_;
};

}  // namespace litsearch::testing
