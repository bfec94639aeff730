#include "litsearch/pubmed_xml.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstring>
#include <memory>
#include <optional>
#include <string>

#include <expat.h>

#include "litsearch/error.hpp"

namespace litsearch {

namespace {

struct ArticleState {
  std::string pmid;
  std::string title;
  std::string abstract;
  std::string year, month, day, medline_date;
};

// Streaming extraction keyed on the element path. Only the paths below are
// read; nested inline markup inside titles and abstracts (<i>, <sup>, ...)
// contributes its text.
class Extractor {
 public:
  ParsedArticles result;

  void start(const char* name) {
    path_.emplace_back(name);
    if (depth_is("PubmedArticle") || depth_is("PubmedBookArticle")) {
      article_ = ArticleState{};
      in_article_ = true;
      return;
    }
    if (!in_article_) return;
    if (ends_with({"MedlineCitation", "PMID"}) || ends_with({"BookDocument", "PMID"})) {
      capture(article_.pmid);
    } else if (ends_with({"Article", "ArticleTitle"}) || ends_with({"BookDocument", "ArticleTitle"}) ||
               ends_with({"Book", "BookTitle"})) {
      target_ = &article_.title;
      capture_depth_ = path_.size();
      if (!article_.title.empty()) article_.title += ' ';
    } else if (ends_with({"Abstract", "AbstractText"})) {
      target_ = &article_.abstract;
      capture_depth_ = path_.size();
      if (!article_.abstract.empty()) article_.abstract += ' ';
    } else if (in_pub_date()) {
      const std::string& leaf = path_.back();
      if (leaf == "Year") capture(article_.year);
      else if (leaf == "Month") capture(article_.month);
      else if (leaf == "Day") capture(article_.day);
      else if (leaf == "MedlineDate") capture(article_.medline_date);
    }
  }

  void end() {
    if (target_ && path_.size() == capture_depth_) {
      target_ = nullptr;
      capture_depth_ = 0;
    }
    if (depth_is("PubmedArticle") || depth_is("PubmedBookArticle")) finish();
    path_.pop_back();
  }

  void text(const char* s, int len) {
    if (target_) target_->append(s, static_cast<std::size_t>(len));
  }

 private:
  // First occurrence wins.
  void capture(std::string& field) {
    if (!field.empty()) return;
    target_ = &field;
    capture_depth_ = path_.size();
  }

  bool depth_is(const char* name) const {
    return path_.size() == 2 && path_.back() == name;
  }

  bool ends_with(std::initializer_list<const char*> tail) const {
    if (path_.size() < tail.size()) return false;
    auto it = path_.end() - static_cast<std::ptrdiff_t>(tail.size());
    for (const char* name : tail) {
      if (*it++ != name) return false;
    }
    return true;
  }

  bool in_pub_date() const {
    if (path_.size() < 2) return false;
    const std::string& parent = path_[path_.size() - 2];
    return parent == "PubDate";
  }

  void finish() {
    in_article_ = false;
    ArticleState a = std::move(article_);
    trim(a.pmid);
    if (a.pmid.empty()) {
      ++result.malformed;
      return;
    }
    DocumentRecord doc;
    doc.id = a.pmid;
    doc.title = collapse(a.title);
    doc.abstract = collapse(a.abstract);
    doc.source = Source::pubmed;
    if (!read_date(a, doc.pub_date) || (doc.title.empty() && doc.abstract.empty())) {
      ++result.malformed;
      return;
    }
    result.records.push_back(std::move(doc));
  }

  static void trim(std::string& s) {
    auto space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && space(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && space(static_cast<unsigned char>(s[i]))) ++i;
    s.erase(0, i);
  }

  static std::string collapse(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (unsigned char c : s) {
      if (std::isspace(c)) {
        pending_space = !out.empty();
        continue;
      }
      if (pending_space) out += ' ';
      pending_space = false;
      out += static_cast<char>(c);
    }
    return out;
  }

  static std::optional<int> month_number(std::string m) {
    trim(m);
    if (m.empty()) return std::nullopt;
    if (std::isdigit(static_cast<unsigned char>(m[0]))) {
      int v = std::atoi(m.c_str());
      if (v >= 1 && v <= 12) return v;
      return std::nullopt;
    }
    static constexpr std::array<const char*, 12> names = {"jan", "feb", "mar", "apr", "may", "jun",
                                                          "jul", "aug", "sep", "oct", "nov", "dec"};
    std::string lower;
    for (char c : m.substr(0, 3)) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (lower == names[i]) return static_cast<int>(i) + 1;
    }
    return std::nullopt;
  }

  static bool read_date(ArticleState& a, PubDate& out) {
    trim(a.year);
    if (a.year.empty() && !a.medline_date.empty()) {
      // "2016 Mar-Apr", "2015-2016", "2016 Winter"
      trim(a.medline_date);
      a.year = a.medline_date.substr(0, 4);
      auto space = a.medline_date.find(' ');
      if (space != std::string::npos) a.month = a.medline_date.substr(space + 1, 3);
    }
    if (a.year.size() != 4 || !std::all_of(a.year.begin(), a.year.end(),
                                           [](unsigned char c) { return std::isdigit(c); })) {
      return false;
    }
    out.year = std::stoi(a.year);
    out.month = month_number(a.month);
    if (out.month) {
      trim(a.day);
      if (!a.day.empty() && std::isdigit(static_cast<unsigned char>(a.day[0]))) {
        int d = std::atoi(a.day.c_str());
        if (d >= 1 && d <= 31) out.day = d;
      }
    }
    return true;
  }

  std::vector<std::string> path_;
  ArticleState article_;
  bool in_article_ = false;
  std::string* target_ = nullptr;
  std::size_t capture_depth_ = 0;
};

}  // namespace

ParsedArticles parse_pubmed_xml(std::string_view xml) {
  std::unique_ptr<XML_ParserStruct, decltype(&XML_ParserFree)> parser(XML_ParserCreate("UTF-8"),
                                                                      &XML_ParserFree);
  if (!parser) throw std::bad_alloc();
  Extractor extractor;
  XML_SetUserData(parser.get(), &extractor);
  XML_SetElementHandler(
      parser.get(),
      [](void* ud, const XML_Char* name, const XML_Char**) { static_cast<Extractor*>(ud)->start(name); },
      [](void* ud, const XML_Char*) { static_cast<Extractor*>(ud)->end(); });
  XML_SetCharacterDataHandler(parser.get(), [](void* ud, const XML_Char* s, int len) {
    static_cast<Extractor*>(ud)->text(s, len);
  });
  if (XML_Parse(parser.get(), xml.data(), static_cast<int>(xml.size()), XML_TRUE) == XML_STATUS_ERROR) {
    throw ServiceError("malformed EFetch XML at line " +
                       std::to_string(XML_GetCurrentLineNumber(parser.get())) + ": " +
                       XML_ErrorString(XML_GetErrorCode(parser.get())));
  }
  return std::move(extractor.result);
}

}  // namespace litsearch
