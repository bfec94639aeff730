#include <doctest.h>

#include "litsearch/config.hpp"
#include "litsearch/error.hpp"
#include "support/temp_dir.hpp"

using namespace litsearch;
using litsearch::testing::TempDir;
using nlohmann::json;

TEST_CASE("defaults") {
  PipelineConfig c;
  CHECK(c.positive.query == "pathology");
  CHECK(c.positive.year == 2016);
  CHECK_FALSE(c.positive.per_month_cap.has_value());
  CHECK(c.negative.query == "university NOT (pathology)");
  CHECK(c.negative.per_month_cap == std::optional<std::size_t>(1000));
  CHECK(c.ranker.min_p_given_p == 0.05);
  CHECK(c.ranker.score_threshold == 0.70);
  CHECK(c.cr_expression == kCrowdsourcingExpression);
  CHECK(c.stats_top_k == 10);
}

TEST_CASE("relative paths resolve against the config file") {
  TempDir dir;
  dir.write("conf/votes.csv", "article_id,yes,no,not_sure,expert_yes\n");
  json j = {{"screening", {{"votes", "votes.csv"}}}, {"output_dir", "../out"}, {"curation", "/abs/cur.txt"}};
  PipelineConfig c = config_from_json(j, dir / "conf");
  CHECK(*c.votes == dir / "conf/votes.csv");
  CHECK(c.output_dir == dir / "out");
  CHECK(*c.curation == "/abs/cur.txt");
}

TEST_CASE("unknown keys and bad values are usage errors") {
  CHECK_THROWS_WITH_AS(config_from_json({{"fetchh", 1}}, "."), doctest::Contains("config.fetchh"), UsageError);
  CHECK_THROWS_WITH_AS(config_from_json({{"ranker", {{"threshold", 0.7}}}}, "."), doctest::Contains("ranker.threshold"),
                       UsageError);
  CHECK_THROWS_AS(config_from_json({{"ranker", {{"score_threshold", "high"}}}}, "."), UsageError);
  CHECK_THROWS_AS(config_from_json({{"ranker", {{"score_threshold", 1.5}}}}, "."), UsageError);
  CHECK_THROWS_AS(config_from_json({{"compose", {{"dialects", {"scopus"}}}}}, "."), UsageError);
  CHECK_THROWS_AS(config_from_json({{"fetch", {{"negative", {{"per_month_cap", 0}}}}}}, "."), UsageError);
  CHECK_THROWS_AS(config_from_json(json::array(), "."), UsageError);
}

TEST_CASE("file loading") {
  TempDir dir;
  CHECK_THROWS_WITH_AS(load_config(dir / "nope.json"), doctest::Contains("nope.json"), UsageError);
  dir.write("bad.json", "{ not json");
  CHECK_THROWS_AS(load_config(dir / "bad.json"), UsageError);
  PipelineConfig bundled = load_config(bundled_data_dir() / "mini" / "config.json");
  CHECK(bundled.dialects.size() == 2);
  CHECK(bundled.funnel_before.size() == 2);
  CHECK(bundled.funnel_after.front().out_count == 6);
  bundled.offline = true;
  CHECK_NOTHROW(bundled.check_paths());
}

TEST_CASE("missing paths are reported together") {
  PipelineConfig c;
  c.votes = "/nonexistent/votes.csv";
  c.curation = "/nonexistent/cur.txt";
  try {
    c.check_paths();
    FAIL("expected UsageError");
  } catch (const UsageError& e) {
    std::string msg = e.what();
    CHECK(msg.find("votes.csv") != std::string::npos);
    CHECK(msg.find("cur.txt") != std::string::npos);
  }
}

TEST_CASE("snapshot redacts secrets") {
  PipelineConfig c = config_from_json({{"fetch", {{"api_key", "SECRET"}, {"email", "me@x.org"}}}}, ".");
  CHECK(c.positive.credentials.api_key == std::optional<std::string>("SECRET"));
  std::string dumped = c.snapshot().dump();
  CHECK(dumped.find("SECRET") == std::string::npos);
  CHECK(dumped.find("me@x.org") == std::string::npos);
  CHECK(c.snapshot()["ranker"]["score_threshold"] == 0.70);
}
