#pragma once

#include <compare>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace litsearch {

// Calendar date with optional month and day, as PubMed reports them.
struct PubDate {
  int year = 0;
  std::optional<int> month;
  std::optional<int> day;

  // "2016", "2016-03" or "2016-03-07".
  std::string to_string() const;
  static PubDate parse(const std::string& text);

  friend bool operator==(const PubDate&, const PubDate&) = default;
};

enum class Source { pubmed, local };

std::string to_string(Source s);
Source source_from_string(const std::string& s);

struct DocumentRecord {
  std::string id;
  std::string title;
  std::string abstract;
  PubDate pub_date;
  Source source = Source::local;

  friend bool operator==(const DocumentRecord&, const DocumentRecord&) = default;
};

// Positive, negative, or any other caller-chosen name.
class CorpusLabel {
 public:
  enum class Kind { positive, negative, custom };

  static CorpusLabel positive() { return CorpusLabel(Kind::positive, "positive"); }
  static CorpusLabel negative() { return CorpusLabel(Kind::negative, "negative"); }
  static CorpusLabel custom(std::string name);
  static CorpusLabel parse(const std::string& text);

  Kind kind() const noexcept { return kind_; }
  const std::string& name() const noexcept { return name_; }

  friend bool operator==(const CorpusLabel&, const CorpusLabel&) = default;

 private:
  CorpusLabel(Kind kind, std::string name) : kind_(kind), name_(std::move(name)) {}
  Kind kind_;
  std::string name_;
};

// An immutable labeled document collection. Construction enforces unique,
// nonempty ids and that every record carries a title or an abstract.
class Corpus {
 public:
  Corpus(CorpusLabel label, std::vector<DocumentRecord> docs);

  const CorpusLabel& label() const noexcept { return label_; }
  const std::vector<DocumentRecord>& docs() const noexcept { return docs_; }
  std::size_t n_docs() const noexcept { return docs_.size(); }
  bool empty() const noexcept { return docs_.empty(); }

  friend bool operator==(const Corpus&, const Corpus&) = default;

 private:
  CorpusLabel label_;
  std::vector<DocumentRecord> docs_;
};

// Line-delimited JSON: a header object {"label":..,"n_docs":..} followed by
// one DocumentRecord object per line.
void write_corpus(std::ostream& out, const Corpus& corpus);
Corpus read_corpus(std::istream& in);

void save_corpus(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_corpus(const std::filesystem::path& path);

}  // namespace litsearch
