#include "litsearch/text.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>
#include <vector>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "litsearch/error.hpp"

namespace litsearch {

namespace detail {
extern const std::string_view kEmbeddedStopWords;
}

namespace {

void append_utf8(std::string& out, UChar32 c) {
  if (c < 0x80) {
    out += static_cast<char>(c);
  } else if (c < 0x800) {
    out += static_cast<char>(0xC0 | (c >> 6));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else if (c < 0x10000) {
    out += static_cast<char>(0xE0 | (c >> 12));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (c >> 18));
    out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (c & 0x3F));
  }
}

std::string fold(std::string_view word) {
  std::string out;
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(word.data(), static_cast<int32_t>(word.size())));
  for (int32_t i = 0; i < u.length(); i = u.moveIndex32(i, 1)) {
    append_utf8(out, u_foldCase(u.char32At(i), U_FOLD_CASE_DEFAULT));
  }
  return out;
}

// Calls emit(raw, folded, length_in_code_points) for every alphabetic run.
template <typename Emit>
void scan_words(std::string_view text, bool fold_case, Emit&& emit) {
  std::string raw, folded;
  std::size_t length = 0;
  auto flush = [&] {
    if (length) emit(fold_case ? folded : raw, folded, length);
    raw.clear();
    folded.clear();
    length = 0;
  };

  bool ascii = std::all_of(text.begin(), text.end(), [](char c) { return static_cast<unsigned char>(c) < 0x80; });
  if (ascii) {
    for (char ch : text) {
      unsigned char c = static_cast<unsigned char>(ch);
      if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
        raw += static_cast<char>(c);
        folded += static_cast<char>(c | 0x20);
        ++length;
      } else {
        flush();
      }
    }
    flush();
    return;
  }

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(std::string("ICU NFC unavailable: ") + u_errorName(status));
  icu::UnicodeString source =
      icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  icu::UnicodeString normalized = nfc->normalize(source, status);
  if (U_FAILURE(status)) throw Error(std::string("NFC normalization failed: ") + u_errorName(status));

  for (int32_t i = 0; i < normalized.length(); i = normalized.moveIndex32(i, 1)) {
    UChar32 c = normalized.char32At(i);
    if (u_isalpha(c)) {
      append_utf8(raw, c);
      append_utf8(folded, u_foldCase(c, U_FOLD_CASE_DEFAULT));
      ++length;
    } else {
      flush();
    }
  }
  flush();
}

bool keep(const std::string& folded, std::size_t length, const TokenizerConfig& cfg) {
  return length >= cfg.min_token_length && !cfg.stop_words.contains(folded);
}

std::string document_text(const DocumentRecord& doc) {
  std::string text = doc.title;
  if (!text.empty() && !doc.abstract.empty()) text += ' ';
  text += doc.abstract;
  return text;
}

}  // namespace

StopWordSet parse_stop_words(std::string_view text) {
  StopWordSet out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto last = line.find_last_not_of(" \t\r");
    out.insert(fold(std::string_view(line).substr(first, last - first + 1)));
  }
  return out;
}

const StopWordSet& default_stop_words() {
  static const StopWordSet words = parse_stop_words(detail::kEmbeddedStopWords);
  return words;
}

StopWordSet load_stop_words(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open stop-word file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_stop_words(buf.str());
}

TokenSet tokenize(std::string_view text, const TokenizerConfig& cfg) {
  TokenSet out;
  scan_words(text, cfg.fold_case, [&](const std::string& token, const std::string& folded, std::size_t len) {
    if (keep(folded, len, cfg)) out.insert(token);
  });
  return out;
}

DocFrequencyTable::DocFrequencyTable(CorpusLabel label, std::size_t n_docs,
                                     std::map<std::string, std::size_t> counts)
    : label_(std::move(label)), n_docs_(n_docs), counts_(std::move(counts)) {
  if (n_docs_ == 0) throw UsageError("document-frequency table over zero documents");
  for (const auto& [word, f] : counts_) {
    if (f == 0 || f > n_docs_) {
      throw UsageError("document frequency of '" + word + "' out of range: " + std::to_string(f));
    }
  }
}

std::size_t DocFrequencyTable::count(const std::string& word) const {
  auto it = counts_.find(word);
  return it == counts_.end() ? 0 : it->second;
}

DocFrequencyTable doc_frequency(const Corpus& corpus, const TokenizerConfig& cfg, unsigned threads) {
  if (corpus.empty()) throw UsageError("cannot count document frequencies of an empty corpus");
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const auto& docs = corpus.docs();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, docs.size()));

  std::vector<std::unordered_map<std::string, std::size_t>> partial(threads);
  auto work = [&](unsigned t) {
    auto& local = partial[t];
    for (std::size_t i = t; i < docs.size(); i += threads) {
      for (const auto& token : tokenize(document_text(docs[i]), cfg)) ++local[token];
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }

  std::map<std::string, std::size_t> counts;
  for (auto& local : partial) {
    for (auto& [word, f] : local) counts[word] += f;
  }
  return DocFrequencyTable(corpus.label(), corpus.n_docs(), std::move(counts));
}

double conditional_probability(const DocFrequencyTable& table, const std::string& word) {
  return static_cast<double>(table.count(word)) / static_cast<double>(table.n_docs());
}

VocabularyStats vocabulary_stats(const Corpus& corpus, const TokenizerConfig& cfg) {
  VocabularyStats stats;
  stats.n_docs = corpus.n_docs();
  std::unordered_set<std::string> all, filtered;
  for (const auto& doc : corpus.docs()) {
    scan_words(document_text(doc), cfg.fold_case,
               [&](const std::string& token, const std::string& folded, std::size_t len) {
                 ++stats.token_occurrences_all;
                 all.insert(token);
                 if (keep(folded, len, cfg)) {
                   ++stats.token_occurrences_filtered;
                   filtered.insert(token);
                 }
               });
  }
  stats.distinct_words_all = all.size();
  stats.distinct_words_filtered = filtered.size();
  return stats;
}

}  // namespace litsearch
