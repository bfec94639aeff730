#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "litsearch/entrez.hpp"
#include "litsearch/query.hpp"
#include "litsearch/ranker.hpp"
#include "litsearch/screening.hpp"
#include "litsearch/text.hpp"

namespace litsearch {

inline constexpr const char* kCrowdsourcingExpression =
    "crowdsourc* OR \"crowd source\" OR \"crowd sourcing\" OR \"crowd sourced\" OR "
    "\"citizen science\" OR \"citizen scientist\" OR \"citizen scientists\"";

std::filesystem::path bundled_data_dir();

struct PipelineConfig {
  // fetch
  FetchSpec positive{"pathology", 2016, std::nullopt, {}};
  FetchSpec negative{"university NOT (pathology)", 2016, 1000, {}};
  std::optional<std::size_t> requests_per_second;
  std::string base_url = ClientOptions{}.base_url;
  int max_retries = RetryPolicy{}.max_retries;
  std::filesystem::path positive_fixture = bundled_data_dir() / "mini" / "positive.jsonl";
  std::filesystem::path negative_fixture = bundled_data_dir() / "mini" / "negative.jsonl";

  // rank
  TokenizerConfig tokenizer;
  std::optional<std::filesystem::path> stop_words;
  RankerConfig ranker;
  bool merge_plurals = true;
  std::optional<std::filesystem::path> curation;
  std::optional<std::size_t> table_top_k;  // default: every selected term
  std::size_t stats_top_k = 10;

  // compose
  std::string cr_expression = kCrowdsourcingExpression;
  std::vector<query::Dialect> dialects{query::Dialect::generic};

  // screen
  ScreeningPolicy policy;
  std::optional<std::filesystem::path> votes;
  std::string crowd_stage_name = "crowd screening";
  std::string funnel_final_name = "selected";
  std::vector<FunnelStage> funnel_before;
  std::vector<FunnelStage> funnel_after;

  // report
  std::optional<std::filesystem::path> trend_counts;
  std::vector<int> trend_years;

  std::filesystem::path output_dir = "out";
  bool offline = false;
  bool precise = false;

  // Effective configuration, embedded in every artifact header.
  nlohmann::json snapshot() const;
  // Throws UsageError listing every referenced input path that is missing.
  void check_paths() const;
};

// Relative paths inside the file resolve against the file's directory.
// Unknown keys are rejected.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);

}  // namespace litsearch
