#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>

#include "litsearch/corpus.hpp"

namespace litsearch {

using StopWordSet = std::unordered_set<std::string>;

// The bundled 179-word English list.
const StopWordSet& default_stop_words();

// One lowercase word per line; '#' starts a comment. Entries are case-folded
// on load.
StopWordSet parse_stop_words(std::string_view text);
StopWordSet load_stop_words(const std::filesystem::path& path);

struct TokenizerConfig {
  std::size_t min_token_length = 2;  // in code points
  bool fold_case = true;
  StopWordSet stop_words = default_stop_words();
};

using TokenSet = std::set<std::string>;

// Distinct tokens of `text`. A token is a maximal run of alphabetic code
// points after NFC normalization; everything else separates. No stemming.
TokenSet tokenize(std::string_view text, const TokenizerConfig& cfg);

// Per-word document frequencies of one corpus.
class DocFrequencyTable {
 public:
  DocFrequencyTable(CorpusLabel label, std::size_t n_docs, std::map<std::string, std::size_t> counts);

  const CorpusLabel& label() const noexcept { return label_; }
  std::size_t n_docs() const noexcept { return n_docs_; }
  const std::map<std::string, std::size_t>& counts() const noexcept { return counts_; }
  std::size_t count(const std::string& word) const;

 private:
  CorpusLabel label_;
  std::size_t n_docs_;
  std::map<std::string, std::size_t> counts_;
};

// Title and abstract are joined before tokenizing; each document contributes
// at most one to a word's count. Runs on up to `threads` worker threads
// (0 = hardware concurrency); the result does not depend on the thread count.
DocFrequencyTable doc_frequency(const Corpus& corpus, const TokenizerConfig& cfg, unsigned threads = 1);

// counts[w] / n_docs; 0 for absent words.
double conditional_probability(const DocFrequencyTable& table, const std::string& word);

struct VocabularyStats {
  std::size_t n_docs = 0;
  std::size_t distinct_words_all = 0;       // before stop-word and length filtering
  std::size_t distinct_words_filtered = 0;  // after
  std::size_t token_occurrences_all = 0;
  std::size_t token_occurrences_filtered = 0;
};

VocabularyStats vocabulary_stats(const Corpus& corpus, const TokenizerConfig& cfg);

}  // namespace litsearch
