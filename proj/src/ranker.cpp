#include "litsearch/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "litsearch/error.hpp"

namespace litsearch {

void RankerConfig::validate() const {
  auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!open_unit(min_p_given_p)) throw UsageError("min_p_given_p must lie in (0,1)");
  if (!open_unit(score_threshold)) throw UsageError("score_threshold must lie in (0,1)");
}

double discriminative_score(double p_given_p, double p_given_n) {
  if (!(p_given_p >= 0.0) || !(p_given_n >= 0.0)) {
    throw UsageError("probabilities must be nonnegative numbers");
  }
  const double denom = p_given_p + p_given_n;
  if (denom == 0.0) throw UsageError("word absent from both corpora");
  return p_given_p / denom;
}

bool ranks_before(const TermScore& a, const TermScore& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.df_p != b.df_p) return a.df_p > b.df_p;
  return a.word < b.word;
}

TermScore score_word(const DocFrequencyTable& p_table, const DocFrequencyTable& n_table,
                     const std::string& word) {
  TermScore s;
  s.word = word;
  s.df_p = p_table.count(word);
  s.df_n = n_table.count(word);
  s.p_given_p = conditional_probability(p_table, word);
  s.p_given_n = conditional_probability(n_table, word);
  s.score = discriminative_score(s.p_given_p, s.p_given_n);
  return s;
}

std::vector<TermScore> score_terms(const DocFrequencyTable& p_table, const DocFrequencyTable& n_table,
                                   const RankerConfig& cfg) {
  cfg.validate();
  std::vector<TermScore> out;
  for (const auto& [word, df] : p_table.counts()) {
    const double p = static_cast<double>(df) / static_cast<double>(p_table.n_docs());
    if (p < cfg.min_p_given_p) continue;
    out.push_back(score_word(p_table, n_table, word));
  }
  if (out.empty()) {
    throw UsageError("no positive-corpus word reaches min_p_given_p=" + std::to_string(cfg.min_p_given_p));
  }
  std::sort(out.begin(), out.end(), ranks_before);
  return out;
}

std::vector<std::pair<std::string, double>> most_probable_words(const DocFrequencyTable& table,
                                                                std::size_t top_k) {
  std::vector<std::pair<std::string, std::size_t>> items(table.counts().begin(), table.counts().end());
  std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (items.size() > top_k) items.resize(top_k);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(items.size());
  for (auto& [word, df] : items) {
    out.emplace_back(word, static_cast<double>(df) / static_cast<double>(table.n_docs()));
  }
  return out;
}

namespace {

std::string strip_wildcard(const std::string& term) {
  return !term.empty() && term.back() == '*' ? term.substr(0, term.size() - 1) : term;
}

}  // namespace

void CurationList::validate() const {
  for (const auto& add : additions) {
    if (add.empty() || add == "*") throw UsageError("empty curation addition");
    if (exclusions.contains(add) || exclusions.contains(strip_wildcard(add))) {
      throw UsageError("'" + add + "' is both excluded and added");
    }
  }
}

std::vector<SelectedTerm> select_terms(const std::vector<TermScore>& scores, const RankerConfig& cfg,
                                       const CurationList& curation) {
  cfg.validate();
  curation.validate();

  std::vector<const TermScore*> kept;
  for (const auto& s : scores) {
    if (s.score > cfg.score_threshold && !curation.exclusions.contains(s.word)) kept.push_back(&s);
  }

  if (curation.merge_plurals) {
    std::unordered_set<std::string> words;
    for (const auto* s : kept) words.insert(s->word);
    auto is_dropped_plural = [&](const std::string& w) {
      if (curation.keep_plurals.contains(w)) return false;
      if (auto irr = curation.irregular_plurals.find(w); irr != curation.irregular_plurals.end()) {
        return words.contains(irr->second);
      }
      return w.size() > 1 && w.back() == 's' && words.contains(w.substr(0, w.size() - 1));
    };
    std::erase_if(kept, [&](const TermScore* s) { return is_dropped_plural(s->word); });
  }

  std::vector<SelectedTerm> out;
  out.reserve(kept.size() + curation.additions.size());
  for (const auto* s : kept) out.push_back({s->word, *s, false});
  for (const auto& add : curation.additions) out.push_back({add, std::nullopt, true});
  if (out.empty()) throw UsageError("no terms selected; lower threshold or reduce exclusions");
  return out;
}

}  // namespace litsearch
