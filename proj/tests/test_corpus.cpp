#include <doctest.h>

#include <random>
#include <sstream>

#include "litsearch/corpus.hpp"
#include "litsearch/error.hpp"
#include "support/temp_dir.hpp"

using namespace litsearch;
using litsearch::testing::TempDir;

namespace {

DocumentRecord doc(std::string id, std::string title, std::string abstract = "") {
  return {std::move(id), std::move(title), std::move(abstract), {2016, 3, std::nullopt}, Source::pubmed};
}

std::string random_text(std::mt19937_64& rng) {
  static const std::string alphabet = "abcXYZ 0123\"\\\n\t,.";
  std::uniform_int_distribution<std::size_t> len(0, 40);
  std::string s;
  for (std::size_t n = len(rng); n > 0; --n) {
    switch (std::uniform_int_distribution<int>(0, 9)(rng)) {
      case 0: s += "é"; break;
      case 1: s += "漢"; break;
      case 2: s += "😀"; break;
      default: s += alphabet[std::uniform_int_distribution<std::size_t>(0, alphabet.size() - 1)(rng)];
    }
  }
  return s;
}

}  // namespace

TEST_CASE("pub dates print and parse at every precision") {
  CHECK(PubDate{2016, std::nullopt, std::nullopt}.to_string() == "2016");
  CHECK(PubDate{2016, 3, std::nullopt}.to_string() == "2016-03");
  CHECK(PubDate{2016, 3, 7}.to_string() == "2016-03-07");
  CHECK(PubDate::parse("2016-03-07") == PubDate{2016, 3, 7});
  CHECK(PubDate::parse("2016") == PubDate{2016, std::nullopt, std::nullopt});
  CHECK_THROWS_AS(PubDate::parse("2016-13"), SchemaError);
  CHECK_THROWS_AS(PubDate::parse("16"), SchemaError);
}

TEST_CASE("corpus construction enforces its invariants") {
  CHECK_NOTHROW(Corpus(CorpusLabel::positive(), {doc("1", "t"), doc("2", "", "a")}));
  CHECK_THROWS_AS(Corpus(CorpusLabel::positive(), {doc("1", "t"), doc("1", "u")}), SchemaError);
  CHECK_THROWS_AS(Corpus(CorpusLabel::positive(), {doc("", "t")}), SchemaError);
  CHECK_THROWS_AS(Corpus(CorpusLabel::positive(), {doc("1", "", "")}), SchemaError);
  CHECK(Corpus(CorpusLabel::negative(), {}).empty());
}

TEST_CASE("labels") {
  CHECK(CorpusLabel::parse("positive") == CorpusLabel::positive());
  CHECK(CorpusLabel::parse("negative").kind() == CorpusLabel::Kind::negative);
  CHECK(CorpusLabel::parse("oncology").kind() == CorpusLabel::Kind::custom);
  CHECK(CorpusLabel::parse("oncology").name() == "oncology");
}

TEST_CASE("random corpora survive a JSONL round trip") {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 50; ++round) {
    std::vector<DocumentRecord> docs;
    const int n = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int i = 0; i < n; ++i) {
      DocumentRecord r;
      r.id = std::to_string(round) + "-" + std::to_string(i);
      r.title = random_text(rng);
      r.abstract = random_text(rng);
      if (r.title.empty() && r.abstract.empty()) r.abstract = "x";
      r.pub_date = {2000 + i, i % 2 ? std::optional<int>(i % 12 + 1) : std::nullopt, std::nullopt};
      r.source = i % 3 ? Source::pubmed : Source::local;
      docs.push_back(r);
    }
    Corpus c(round % 2 ? CorpusLabel::positive() : CorpusLabel::custom("misc"), docs);
    std::stringstream buf;
    write_corpus(buf, c);
    CHECK(read_corpus(buf) == c);
  }
}

TEST_CASE("save and load through the filesystem") {
  TempDir dir;
  Corpus c(CorpusLabel::negative(), {doc("10", "Title", "Body text")});
  save_corpus(c, dir / "sub/n.jsonl");
  CHECK(load_corpus(dir / "sub/n.jsonl") == c);
  CHECK_THROWS_AS(load_corpus(dir / "missing.jsonl"), IoError);
}

TEST_CASE("a duplicate id is reported with its line") {
  std::stringstream in;
  in << R"({"label":"positive","n_docs":4})" << "\n";
  in << R"({"id":"a","title":"t","abstract":"","pub_date":"2016","source":"pubmed"})" << "\n";
  in << R"({"id":"b","title":"t","abstract":"","pub_date":"2016","source":"pubmed"})" << "\n";
  in << R"({"id":"a","title":"t","abstract":"","pub_date":"2016","source":"pubmed"})" << "\n";
  in << R"({"id":"c","title":"t","abstract":"","pub_date":"2016","source":"pubmed"})" << "\n";
  try {
    read_corpus(in);
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
}

TEST_CASE("header count must match the body") {
  std::stringstream in;
  in << R"({"label":"positive","n_docs":5})" << "\n";
  for (int i = 0; i < 4; ++i) {
    in << R"({"id":")" << i << R"(","title":"t","abstract":"","pub_date":"2016","source":"pubmed"})" << "\n";
  }
  CHECK_THROWS_WITH_AS(read_corpus(in), doctest::Contains("count mismatch"), SchemaError);
}

TEST_CASE("malformed lines") {
  auto parse = [](const std::string& text) {
    std::stringstream in(text);
    return read_corpus(in);
  };
  CHECK_THROWS_AS(parse(""), SchemaError);
  CHECK_THROWS_AS(parse("not json\n"), SchemaError);
  CHECK_THROWS_AS(parse(R"({"label":"positive","n_docs":1})" "\n{\"id\":1}\n"), SchemaError);
  CHECK_THROWS_AS(parse(R"({"label":"positive","n_docs":1})" "\n" R"({"id":"a","title":"t","abstract":"","pub_date":"20x6","source":"pubmed"})" "\n"),
                  SchemaError);
}
