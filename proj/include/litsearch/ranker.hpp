#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "litsearch/text.hpp"

namespace litsearch {

struct TermScore {
  std::string word;
  std::size_t df_p = 0;
  std::size_t df_n = 0;
  double p_given_p = 0.0;  // n_{w,P} / N_P
  double p_given_n = 0.0;  // n_{w,N} / N_N
  double score = 0.0;      // p_given_p / (p_given_p + p_given_n)

  friend bool operator==(const TermScore&, const TermScore&) = default;
};

struct RankerConfig {
  double min_p_given_p = 0.05;   // words with p_given_p strictly below are dropped
  double score_threshold = 0.70; // words with score strictly above are selected

  void validate() const;
};

// How strongly a word indicates the positive topic, with the topic prior
// dropped (it is the same for every word and cannot change the ranking).
// Unsmoothed: a word absent from the negative corpus scores exactly 1.
double discriminative_score(double p_given_p, double p_given_n);

// Score order: score descending, then df_p descending, then word ascending.
bool ranks_before(const TermScore& a, const TermScore& b);

TermScore score_word(const DocFrequencyTable& p_table, const DocFrequencyTable& n_table,
                     const std::string& word);

// One entry per positive-corpus word whose p_given_p clears the document
// frequency floor, sorted by ranks_before.
std::vector<TermScore> score_terms(const DocFrequencyTable& p_table, const DocFrequencyTable& n_table,
                                   const RankerConfig& cfg);

// Most probable words of a single corpus (p descending, then word), for the
// per-corpus probability tables.
std::vector<std::pair<std::string, double>> most_probable_words(const DocFrequencyTable& table,
                                                                std::size_t top_k);

// Manual review applied after thresholding.
struct CurationList {
  std::set<std::string> exclusions;
  bool merge_plurals = true;
  std::vector<std::string> additions;  // verbatim query terms, may end in '*'
  // plural -> singular pairs the "+s" rule cannot see.
  std::map<std::string, std::string> irregular_plurals = default_irregular_plurals();
  // Plurals that stay even when their singular is kept.
  std::set<std::string> keep_plurals;

  static std::map<std::string, std::string> default_irregular_plurals() { return {{"mice", "mouse"}}; }
  void validate() const;
};

// Sections [exclude], [add], [irregular-plurals] ("plural singular" or
// "plural -> singular"), [keep-plurals]; '#' comments.
CurationList parse_curation(std::string_view text);
CurationList load_curation(const std::filesystem::path& path);

struct SelectedTerm {
  std::string term;                 // as it goes into the query
  std::optional<TermScore> score;   // absent for additions
  bool added = false;
};

std::vector<SelectedTerm> select_terms(const std::vector<TermScore>& scores, const RankerConfig& cfg,
                                       const CurationList& curation);

}  // namespace litsearch
