#include <doctest.h>

#include <algorithm>
#include <mutex>
#include <set>
#include <thread>

#include "litsearch/entrez.hpp"
#include "litsearch/error.hpp"
#include "litsearch/pubmed_xml.hpp"
#include "support/manual_clock.hpp"
#include "support/mock_entrez.hpp"

using namespace litsearch;
using litsearch::testing::ManualClock;
using litsearch::testing::MockDoc;
using litsearch::testing::MockEntrez;

namespace {

struct Rig {
  std::shared_ptr<ManualClock> clock = std::make_shared<ManualClock>();
  std::shared_ptr<MockEntrez> mock = std::make_shared<MockEntrez>();
  ClientOptions options;

  Rig() {
    options.clock = clock;
    mock->clock = clock;
  }
  EntrezClient client() { return EntrezClient(mock, options); }
};

FetchSpec spec(const std::string& q, int year = 2016, std::optional<std::size_t> cap = std::nullopt) {
  return FetchSpec{q, year, cap, {}};
}

// Largest number of timestamps inside any half-open one-second interval.
std::size_t densest_second(const std::vector<Clock::time_point>& ts) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    std::size_t n = 0;
    for (auto t : ts) {
      if (t >= ts[i] && t < ts[i] + std::chrono::seconds(1)) ++n;
    }
    best = std::max(best, n);
  }
  return best;
}

}  // namespace

TEST_CASE("date helpers") {
  CHECK(Date{2016, 3, 7}.to_entrez() == "2016/03/07");
  CHECK(days_in_month(2016, 2) == 29);
  CHECK(days_in_month(2015, 2) == 28);
  CHECK(days_in_month(1900, 2) == 28);
  CHECK(days_in_month(2000, 2) == 29);
  CHECK(DateWindow::year(2016) == DateWindow{{2016, 1, 1}, {2016, 12, 31}});
  CHECK(DateWindow::month(2016, 4).to == Date{2016, 4, 30});
  CHECK(DateWindow::through_year(2013).to == Date{2013, 12, 31});
  CHECK(DateWindow::through_year(2013).from.year < 1900);
  CHECK_THROWS_AS(DateWindow::month(2016, 13), UsageError);
}

TEST_CASE("url encoding") {
  CHECK(url_encode("a b") == "a%20b");
  CHECK(url_encode("\"crowd source\"") == "%22crowd%20source%22");
  CHECK(url_encode("crowdsourc*") == "crowdsourc%2A");
  CHECK(url_encode("A-z_0.9~") == "A-z_0.9~");
  HttpRequest r{"http://x/e", {{"term", "a OR b"}, {"db", "pubmed"}}};
  CHECK(r.full_url() == "http://x/e?term=a%20OR%20b&db=pubmed");
  CHECK(r.param("db") == "pubmed");
  CHECK(r.param("absent").empty());
}

TEST_CASE("rate limiter never exceeds its budget in any one-second window") {
  for (std::size_t rate : {1u, 3u, 10u}) {
    auto clock = std::make_shared<ManualClock>();
    RateLimiter limiter(rate, clock);
    std::vector<Clock::time_point> ts;
    for (int i = 0; i < 40; ++i) {
      ts.push_back(limiter.acquire());
      if (i % 7 == 0) clock->advance(std::chrono::milliseconds(130));
    }
    CHECK(densest_second(ts) <= rate);
    CHECK(std::is_sorted(ts.begin(), ts.end()));
  }
  CHECK_THROWS_AS(RateLimiter(0), UsageError);
}

TEST_CASE("rate limiter is safe under concurrent callers") {
  auto clock = std::make_shared<ManualClock>();
  RateLimiter limiter(5, clock);
  std::vector<Clock::time_point> ts;
  std::mutex m;
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (int i = 0; i < 10; ++i) {
        auto at = limiter.acquire();
        std::lock_guard lock(m);
        ts.push_back(at);
      }
    });
  }
  for (auto& t : threads) t.join();
  std::sort(ts.begin(), ts.end());
  CHECK(ts.size() == 40);
  CHECK(densest_second(ts) <= 5);
}

TEST_CASE("client requests respect the default three per second without a key") {
  Rig rig;
  for (int i = 0; i < 7; ++i) rig.mock->add("q", {"id" + std::to_string(i), {2016, 1, 1}});
  auto client = rig.client();
  for (int i = 0; i < 12; ++i) client.esearch(spec("q"), DateWindow::year(2016), 0, 5);
  CHECK(rig.mock->timestamps.size() == 12);
  CHECK(densest_second(rig.mock->timestamps) <= 3);

  Rig keyed;
  keyed.options.credentials.api_key = "k";
  auto fast = keyed.client();
  for (int i = 0; i < 25; ++i) fast.esearch(spec("q"), DateWindow::year(2016), 0, 5);
  CHECK(densest_second(keyed.mock->timestamps) <= 10);
  CHECK(densest_second(keyed.mock->timestamps) > 3);
  CHECK(keyed.mock->requests.back().param("api_key") == "k");
}

TEST_CASE("esearch passes ids through") {
  Rig rig;
  for (auto id : {"A", "B", "C"}) rig.mock->add("q", {id, {2016, 5, 1}});
  auto client = rig.client();
  SearchPage page = client.esearch(spec("q"), DateWindow::year(2016), 0, 100);
  CHECK(page.total_hits == 3);
  CHECK(page.ids == std::vector<std::string>{"A", "B", "C"});
  CHECK(client.esearch(spec("zqxwv nonsense"), DateWindow::year(2016), 0, 100).total_hits == 0);
  const auto& req = rig.mock->requests.front();
  CHECK(req.param("mindate") == "2016/01/01");
  CHECK(req.param("maxdate") == "2016/12/31");
  CHECK(req.param("datetype") == "pdat");
}

TEST_CASE("pagination issues ceil(K/p) calls") {
  for (std::size_t k : {1u, 9u, 10u, 11u, 25u, 40u}) {
    for (std::size_t p : {1u, 3u, 10u, 100u}) {
      Rig rig;
      rig.options.esearch_page = p;
      for (std::size_t i = 0; i < k; ++i) rig.mock->add("q", {std::to_string(i), {2016, 2, 1}});
      auto client = rig.client();
      SearchPage all = client.esearch_all(spec("q"), DateWindow::year(2016));
      CHECK(all.ids.size() == k);
      CHECK(rig.mock->count("esearch.fcgi") == (k + p - 1) / p);
    }
  }
}

TEST_CASE("efetch batches at most 200 ids per request") {
  Rig rig;
  std::vector<std::string> ids;
  for (int i = 0; i < 450; ++i) {
    ids.push_back(std::to_string(1000 + i));
    rig.mock->add("q", {ids.back(), {2016, 1, 1}});
  }
  auto client = rig.client();
  FetchResult r = client.efetch_abstracts(ids);
  CHECK(rig.mock->count("efetch.fcgi") == 3);
  CHECK(r.records.size() == 450);
  CHECK(r.records.front().id == "1000");
  CHECK(r.records.back().id == "1449");
}

TEST_CASE("records without an abstract are skipped and listed") {
  Rig rig;
  rig.mock->add("q", {"1", {2016, 1, 1}});
  rig.mock->add("q", {"2", {2016, 1, 1}, false});
  rig.mock->add("q", {"3", {2016, 1, 1}});
  auto client = rig.client();
  FetchResult r = client.efetch_abstracts({"1", "2", "3"});
  CHECK(r.records.size() == 2);
  CHECK(r.skipped == std::vector<std::string>{"2"});
  for (const auto& d : r.records) CHECK_FALSE(d.abstract.empty());
  CHECK_THROWS_AS(client.efetch_abstracts({}), UsageError);
}

TEST_CASE("transient failures are retried with growing backoff") {
  Rig rig;
  rig.mock->add("q", {"1", {2016, 1, 1}});
  rig.mock->network_failures = 2;
  auto client = rig.client();
  CHECK(client.esearch(spec("q"), DateWindow::year(2016), 0, 10).ids.size() == 1);
  CHECK(client.requests_issued() == 3);
  REQUIRE(rig.clock->sleeps.size() >= 2);
  std::vector<Clock::duration> backoffs;
  for (auto d : rig.clock->sleeps) {
    if (d >= std::chrono::milliseconds(500)) backoffs.push_back(d);
  }
  REQUIRE(backoffs.size() == 2);
  CHECK(backoffs[1] == 2 * backoffs[0]);

  Rig dead;
  dead.mock->network_failures = 100;
  dead.options.retry.max_retries = 2;
  auto c2 = dead.client();
  CHECK_THROWS_AS(c2.esearch(spec("q"), DateWindow::year(2016), 0, 10), NetworkError);
  CHECK(dead.mock->requests.size() == 3);
}

TEST_CASE("service errors") {
  Rig rig;
  rig.mock->forced_status = 400;
  rig.mock->forced_body = "bad term";
  auto client = rig.client();
  try {
    client.esearch(spec("q"), DateWindow::year(2016), 0, 10);
    FAIL("expected ServiceError");
  } catch (const ServiceError& e) {
    CHECK(e.status() == 400);
    CHECK(std::string(e.what()).find("bad term") != std::string::npos);
  }
  CHECK(rig.mock->requests.size() == 1);

  Rig busy;
  busy.mock->forced_status = 503;
  busy.options.retry.max_retries = 1;
  auto c2 = busy.client();
  CHECK_THROWS_AS(c2.esearch(spec("q"), DateWindow::year(2016), 0, 10), ServiceError);
  CHECK(busy.mock->requests.size() == 2);

  Rig junk;
  junk.mock->forced_status = 200;
  junk.mock->forced_body = "<html>oops";
  auto c3 = junk.client();
  CHECK_THROWS_AS(c3.esearch(spec("q"), DateWindow::year(2016), 0, 10), ServiceError);
  CHECK_THROWS_AS(c3.efetch_abstracts({"1"}), ServiceError);
}

TEST_CASE("positive corpus collects every hit of the year") {
  Rig rig;
  for (int i = 0; i < 7; ++i) rig.mock->add("pathology", {"p" + std::to_string(i), {2016, i + 1, 3}});
  rig.mock->add("pathology", {"old", {2015, 6, 1}});
  auto client = rig.client();
  Corpus c = build_positive_corpus(client, spec("pathology"));
  CHECK(c.n_docs() == 7);
  CHECK(c.label() == CorpusLabel::positive());

  Rig empty;
  auto c2 = empty.client();
  CHECK_THROWS_WITH_AS(build_positive_corpus(c2, spec("pathology")), doctest::Contains("empty positive corpus"),
                       ServiceError);
}

TEST_CASE("oversized windows are split by month and then by day") {
  Rig rig;
  rig.options.max_window_records = 5;
  rig.options.esearch_page = 5;
  std::set<std::string> expected;
  for (int i = 0; i < 8; ++i) {
    rig.mock->add("q", {"m" + std::to_string(i), {2016, 3, 1 + i}});
    expected.insert("m" + std::to_string(i));
  }
  for (int i = 0; i < 4; ++i) {
    rig.mock->add("q", {"j" + std::to_string(i), {2016, 7, 2}});
    expected.insert("j" + std::to_string(i));
  }
  auto client = rig.client();
  Corpus c = build_positive_corpus(client, spec("q"));
  std::set<std::string> got;
  for (const auto& d : c.docs()) got.insert(d.id);
  CHECK(got == expected);

  Rig packed;
  packed.options.max_window_records = 2;
  for (int i = 0; i < 3; ++i) packed.mock->add("q", {"d" + std::to_string(i), {2016, 3, 4}});
  auto c2 = packed.client();
  CHECK_THROWS_AS(build_positive_corpus(c2, spec("q")), ServiceError);
}

TEST_CASE("negative corpus takes the first cap hits of each month") {
  SUBCASE("five hits every month, cap three") {
    Rig rig;
    for (int m = 1; m <= 12; ++m) {
      for (int i = 0; i < 5; ++i) rig.mock->add("u", {std::to_string(m * 100 + i), {2016, m, 10}});
    }
    auto client = rig.client();
    Corpus c = build_negative_corpus(client, spec("u", 2016, 3));
    CHECK(c.n_docs() == 36);
    std::set<std::string> ids;
    for (const auto& d : c.docs()) ids.insert(d.id);
    for (int m = 1; m <= 12; ++m) {
      for (int i = 0; i < 3; ++i) CHECK(ids.count(std::to_string(m * 100 + i)) == 1);
      CHECK(ids.count(std::to_string(m * 100 + 3)) == 0);
    }
  }
  SUBCASE("sparse months") {
    Rig rig;
    rig.mock->add("u", {"only", {2016, 3, 9}});
    auto client = rig.client();
    CHECK(build_negative_corpus(client, spec("u", 2016, 2)).n_docs() == 1);
  }
  SUBCASE("full months at the published cap") {
    Rig rig;
    for (int m = 1; m <= 12; ++m) {
      for (int i = 0; i < 1001; ++i) rig.mock->add("u", {std::to_string(m * 10000 + i), {2016, m, 1}});
    }
    auto client = rig.client();
    CHECK(build_negative_corpus(client, spec("u", 2016, 1000)).n_docs() == 12000);
  }
  SUBCASE("cap is required") {
    Rig rig;
    auto client = rig.client();
    CHECK_THROWS_AS(build_negative_corpus(client, spec("u", 2016)), UsageError);
    CHECK_THROWS_AS(build_negative_corpus(client, spec("u", 2016, 0)), UsageError);
  }
}

TEST_CASE("cumulative counts by year") {
  Rig rig;
  for (int i = 0; i < 5; ++i) rig.mock->add("q", {"x" + std::to_string(i), {2010, 1, 1}});
  auto client = rig.client();
  CHECK(count_by_year(client, "q", {2014, 2015}) == std::vector<YearCount>{{2014, 5}, {2015, 5}});

  Rig growing;
  for (int i = 0; i < 10; ++i) growing.mock->add("q", {"a" + std::to_string(i), {2014, 6, 1}});
  for (int i = 0; i < 4; ++i) growing.mock->add("q", {"b" + std::to_string(i), {2015, 6, 1}});
  auto c2 = growing.client();
  auto counts = count_by_year(c2, "q", {2014, 2015});
  CHECK(counts == std::vector<YearCount>{{2014, 10}, {2015, 14}});
  CHECK_THROWS_AS(count_by_year(c2, "q", {2015, 2014}), UsageError);
}

TEST_CASE("credentials come from the environment") {
  ::setenv("ENTREZ_API_KEY", "abc", 1);
  ::setenv("ENTREZ_EMAIL", "me@example.org", 1);
  Credentials c = Credentials::from_environment();
  CHECK(c.api_key == std::optional<std::string>("abc"));
  CHECK(c.email == std::optional<std::string>("me@example.org"));
  ::unsetenv("ENTREZ_API_KEY");
  ::unsetenv("ENTREZ_EMAIL");
  CHECK_FALSE(Credentials::from_environment().api_key.has_value());
}

TEST_CASE("EFetch XML extraction") {
  const std::string xml = R"(<?xml version="1.0"?>
<PubmedArticleSet>
<PubmedArticle><MedlineCitation><PMID Version="1">111</PMID>
<Article><Journal><JournalIssue><PubDate><Year>2016</Year><Month>Mar</Month><Day>07</Day></PubDate></JournalIssue></Journal>
<ArticleTitle>A <i>crowd</i>   study</ArticleTitle>
<Abstract><AbstractText Label="BACKGROUND">First part.</AbstractText><AbstractText Label="RESULTS">Second &amp; last.</AbstractText></Abstract>
</Article>
<CommentsCorrectionsList><CommentsCorrections><PMID Version="1">999</PMID></CommentsCorrections></CommentsCorrectionsList>
</MedlineCitation></PubmedArticle>
<PubmedArticle><MedlineCitation><PMID>222</PMID><Article><Journal><JournalIssue><PubDate><MedlineDate>2016 Nov-Dec</MedlineDate></PubDate></JournalIssue></Journal>
<ArticleTitle>No abstract here</ArticleTitle></Article></MedlineCitation></PubmedArticle>
<PubmedArticle><MedlineCitation><Article><ArticleTitle>Lost id</ArticleTitle></Article></MedlineCitation></PubmedArticle>
<PubmedBookArticle><BookDocument><PMID>333</PMID><Book><PubDate><Year>2015</Year></PubDate><BookTitle>Handbook</BookTitle></Book>
<Abstract><AbstractText>Book abstract.</AbstractText></Abstract></BookDocument></PubmedBookArticle>
</PubmedArticleSet>)";
  ParsedArticles p = parse_pubmed_xml(xml);
  REQUIRE(p.records.size() == 3);
  CHECK(p.malformed == 1);
  CHECK(p.records[0].id == "111");
  CHECK(p.records[0].title == "A crowd study");
  CHECK(p.records[0].abstract == "First part. Second & last.");
  CHECK(p.records[0].pub_date == PubDate{2016, 3, 7});
  CHECK(p.records[1].id == "222");
  CHECK(p.records[1].abstract.empty());
  CHECK(p.records[1].pub_date == PubDate{2016, 11, std::nullopt});
  CHECK(p.records[2].id == "333");
  CHECK(p.records[2].title == "Handbook");
  CHECK(p.records[2].pub_date.year == 2015);

  CHECK_THROWS_AS(parse_pubmed_xml("<PubmedArticleSet><PubmedArticle>"), ServiceError);
  CHECK(parse_pubmed_xml("<PubmedArticleSet/>").records.empty());
}
