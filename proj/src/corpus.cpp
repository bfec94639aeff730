#include "litsearch/corpus.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "litsearch/error.hpp"

namespace litsearch {

using nlohmann::json;

namespace {

int parse_int(std::string_view text, const std::string& whole) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw SchemaError("invalid date '" + whole + "'");
  }
  return value;
}

void check_record(const DocumentRecord& doc) {
  if (doc.id.empty()) throw SchemaError("document with empty id");
  if (doc.title.empty() && doc.abstract.empty()) {
    throw SchemaError("document " + doc.id + " has neither title nor abstract");
  }
}

json record_to_json(const DocumentRecord& doc) {
  // Field order is fixed so that files are byte-stable.
  json j = json::object();
  j["id"] = doc.id;
  j["title"] = doc.title;
  j["abstract"] = doc.abstract;
  j["pub_date"] = doc.pub_date.to_string();
  j["source"] = to_string(doc.source);
  return j;
}

DocumentRecord record_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("expected a JSON object");
  auto field = [&](const char* name) -> std::string {
    auto it = j.find(name);
    if (it == j.end() || !it->is_string()) {
      throw SchemaError(std::string("missing or non-string field '") + name + "'");
    }
    return it->get<std::string>();
  };
  DocumentRecord doc;
  doc.id = field("id");
  doc.title = field("title");
  doc.abstract = field("abstract");
  doc.pub_date = PubDate::parse(field("pub_date"));
  doc.source = source_from_string(field("source"));
  check_record(doc);
  return doc;
}

}  // namespace

std::string PubDate::to_string() const {
  char buf[32];
  if (month && day) {
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, *month, *day);
  } else if (month) {
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, *month);
  } else {
    std::snprintf(buf, sizeof buf, "%04d", year);
  }
  return buf;
}

PubDate PubDate::parse(const std::string& text) {
  PubDate d;
  std::string_view rest = text;
  auto next = [&]() {
    auto dash = rest.find('-');
    std::string_view part = rest.substr(0, dash);
    rest = dash == std::string_view::npos ? std::string_view{} : rest.substr(dash + 1);
    return part;
  };
  std::string_view year = next();
  if (year.size() != 4) throw SchemaError("invalid date '" + text + "'");
  d.year = parse_int(year, text);
  if (!rest.empty()) d.month = parse_int(next(), text);
  if (!rest.empty()) d.day = parse_int(next(), text);
  if (!rest.empty() || (d.month && (*d.month < 1 || *d.month > 12)) ||
      (d.day && (*d.day < 1 || *d.day > 31))) {
    throw SchemaError("invalid date '" + text + "'");
  }
  return d;
}

std::string to_string(Source s) { return s == Source::pubmed ? "pubmed" : "local"; }

Source source_from_string(const std::string& s) {
  if (s == "pubmed") return Source::pubmed;
  if (s == "local") return Source::local;
  throw SchemaError("unknown source '" + s + "'");
}

CorpusLabel CorpusLabel::custom(std::string name) {
  if (name.empty() || name == "positive" || name == "negative") {
    throw UsageError("custom corpus label must be nonempty and distinct from positive/negative");
  }
  return CorpusLabel(Kind::custom, std::move(name));
}

CorpusLabel CorpusLabel::parse(const std::string& text) {
  if (text == "positive") return positive();
  if (text == "negative") return negative();
  return custom(text);
}

Corpus::Corpus(CorpusLabel label, std::vector<DocumentRecord> docs)
    : label_(std::move(label)), docs_(std::move(docs)) {
  std::unordered_set<std::string> seen;
  seen.reserve(docs_.size());
  for (const auto& doc : docs_) {
    check_record(doc);
    if (!seen.insert(doc.id).second) throw SchemaError("duplicate document id " + doc.id);
  }
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  json header = json::object();
  header["label"] = corpus.label().name();
  header["n_docs"] = corpus.n_docs();
  out << header.dump() << '\n';
  for (const auto& doc : corpus.docs()) out << record_to_json(doc).dump() << '\n';
}

Corpus read_corpus(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<CorpusLabel> label;
  std::size_t declared = 0;
  std::vector<DocumentRecord> docs;
  std::unordered_set<std::string> seen;

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("invalid JSON: ") + e.what(), line_no);
    }
    try {
      if (!label) {
        if (!j.is_object() || !j.contains("label") || !j["label"].is_string() ||
            !j.contains("n_docs") || !j["n_docs"].is_number_unsigned()) {
          throw SchemaError("header must be {\"label\": string, \"n_docs\": count}");
        }
        label = CorpusLabel::parse(j["label"].get<std::string>());
        declared = j["n_docs"].get<std::size_t>();
        continue;
      }
      DocumentRecord doc = record_from_json(j);
      if (!seen.insert(doc.id).second) throw SchemaError("duplicate document id " + doc.id);
      docs.push_back(std::move(doc));
    } catch (const SchemaError& e) {
      if (e.line() != 0) throw;
      throw SchemaError(e.what(), line_no);
    } catch (const UsageError& e) {
      throw SchemaError(e.what(), line_no);
    }
  }
  if (!label) throw SchemaError("missing header line");
  if (declared != docs.size()) {
    throw SchemaError("count mismatch: header declares " + std::to_string(declared) +
                      " documents, body has " + std::to_string(docs.size()));
  }
  return Corpus(std::move(*label), std::move(docs));
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_corpus(out, corpus);
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file " + path.string());
  try {
    return read_corpus(in);
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace litsearch
