#include "litsearch/config.hpp"

#include <fstream>
#include <set>

#include "litsearch/error.hpp"

namespace litsearch {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path bundled_data_dir() { return fs::path(LITSEARCH_DATA_DIR); }

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) throw UsageError(where + " must be a JSON object");
  std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!keys.contains(key)) throw UsageError("unknown config key '" + where + "." + key + "'");
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw UsageError("config key '" + where + "." + key + "' has the wrong type");
  }
}

template <typename T>
void read(const json& j, const char* key, std::optional<T>& out, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  T value{};
  read(j, key, value, where);
  out = std::move(value);
}

void read_path(const json& j, const char* key, fs::path& out, const fs::path& base, const std::string& where) {
  std::string text;
  read(j, key, text, where);
  if (!text.empty()) out = (base / text).lexically_normal();
}

void read_path(const json& j, const char* key, std::optional<fs::path>& out, const fs::path& base,
               const std::string& where) {
  std::optional<std::string> text;
  read(j, key, text, where);
  if (text && !text->empty()) out = (base / *text).lexically_normal();
}

void read_fetch_spec(const json& j, FetchSpec& spec, const std::string& where) {
  reject_unknown(j, {"query", "year", "per_month_cap"}, where);
  read(j, "query", spec.query, where);
  read(j, "year", spec.year, where);
  if (j.contains("per_month_cap")) {
    spec.per_month_cap.reset();
    read(j, "per_month_cap", spec.per_month_cap, where);
  }
}

std::vector<FunnelStage> read_stages(const json& j, const char* key, const std::string& where) {
  std::vector<FunnelStage> out;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return out;
  if (!it->is_array()) throw UsageError("config key '" + where + "." + key + "' must be an array");
  for (const auto& stage : *it) {
    const std::string w = where + "." + key + "[]";
    reject_unknown(stage, {"name", "in", "out"}, w);
    FunnelStage s;
    read(stage, "name", s.name, w);
    read(stage, "in", s.in_count, w);
    read(stage, "out", s.out_count, w);
    out.push_back(std::move(s));
  }
  return out;
}

json stages_json(const std::vector<FunnelStage>& stages) {
  json out = json::array();
  for (const auto& s : stages) out.push_back({{"name", s.name}, {"in", s.in_count}, {"out", s.out_count}});
  return out;
}

json optional_path(const std::optional<fs::path>& p) { return p ? json(p->generic_string()) : json(nullptr); }

json spec_json(const FetchSpec& spec) {
  json j = json::object();
  j["query"] = spec.query;
  j["year"] = spec.year;
  j["per_month_cap"] = spec.per_month_cap ? json(*spec.per_month_cap) : json(nullptr);
  return j;
}

}  // namespace

PipelineConfig config_from_json(const json& j, const fs::path& base) {
  PipelineConfig cfg;
  reject_unknown(j, {"fetch", "tokenizer", "ranker", "curation", "compose", "policy", "screening", "report",
                     "output_dir"},
                 "config");
  Credentials env = Credentials::from_environment();

  if (auto f = j.find("fetch"); f != j.end()) {
    reject_unknown(*f, {"positive", "negative", "requests_per_second", "base_url", "max_retries", "email", "tool", "api_key",
                        "offline_fixtures"},
                   "fetch");
    if (f->contains("positive")) read_fetch_spec((*f)["positive"], cfg.positive, "fetch.positive");
    if (f->contains("negative")) read_fetch_spec((*f)["negative"], cfg.negative, "fetch.negative");
    read(*f, "requests_per_second", cfg.requests_per_second, "fetch");
    read(*f, "base_url", cfg.base_url, "fetch");
    read(*f, "max_retries", cfg.max_retries, "fetch");
    read(*f, "email", env.email, "fetch");
    read(*f, "tool", env.tool, "fetch");
    read(*f, "api_key", env.api_key, "fetch");
    if (auto fx = f->find("offline_fixtures"); fx != f->end()) {
      reject_unknown(*fx, {"positive", "negative"}, "fetch.offline_fixtures");
      read_path(*fx, "positive", cfg.positive_fixture, base, "fetch.offline_fixtures");
      read_path(*fx, "negative", cfg.negative_fixture, base, "fetch.offline_fixtures");
    }
  }
  cfg.positive.credentials = env;
  cfg.negative.credentials = env;

  if (auto t = j.find("tokenizer"); t != j.end()) {
    reject_unknown(*t, {"min_token_length", "fold_case", "stop_words"}, "tokenizer");
    read(*t, "min_token_length", cfg.tokenizer.min_token_length, "tokenizer");
    read(*t, "fold_case", cfg.tokenizer.fold_case, "tokenizer");
    read_path(*t, "stop_words", cfg.stop_words, base, "tokenizer");
  }
  if (auto r = j.find("ranker"); r != j.end()) {
    reject_unknown(*r, {"min_p_given_p", "score_threshold", "merge_plurals", "table_top_k", "stats_top_k"}, "ranker");
    read(*r, "min_p_given_p", cfg.ranker.min_p_given_p, "ranker");
    read(*r, "score_threshold", cfg.ranker.score_threshold, "ranker");
    read(*r, "merge_plurals", cfg.merge_plurals, "ranker");
    read(*r, "table_top_k", cfg.table_top_k, "ranker");
    read(*r, "stats_top_k", cfg.stats_top_k, "ranker");
  }
  read_path(j, "curation", cfg.curation, base, "config");
  if (auto c = j.find("compose"); c != j.end()) {
    reject_unknown(*c, {"cr_expression", "dialects"}, "compose");
    read(*c, "cr_expression", cfg.cr_expression, "compose");
    std::vector<std::string> names;
    read(*c, "dialects", names, "compose");
    if (!names.empty()) {
      cfg.dialects.clear();
      for (const auto& n : names) cfg.dialects.push_back(query::dialect_from_string(n));
    }
  }
  if (auto p = j.find("policy"); p != j.end()) {
    reject_unknown(*p, {"majority_threshold", "inconclusive_max_effective", "expert_override_min"}, "policy");
    read(*p, "majority_threshold", cfg.policy.majority_threshold, "policy");
    read(*p, "inconclusive_max_effective", cfg.policy.inconclusive_max_effective, "policy");
    read(*p, "expert_override_min", cfg.policy.expert_override_min, "policy");
  }
  if (auto s = j.find("screening"); s != j.end()) {
    reject_unknown(*s, {"votes", "crowd_stage_name", "final_name", "funnel_before", "funnel_after"}, "screening");
    read_path(*s, "votes", cfg.votes, base, "screening");
    read(*s, "crowd_stage_name", cfg.crowd_stage_name, "screening");
    read(*s, "final_name", cfg.funnel_final_name, "screening");
    cfg.funnel_before = read_stages(*s, "funnel_before", "screening");
    cfg.funnel_after = read_stages(*s, "funnel_after", "screening");
  }
  if (auto r = j.find("report"); r != j.end()) {
    reject_unknown(*r, {"trend_counts", "trend_years"}, "report");
    read_path(*r, "trend_counts", cfg.trend_counts, base, "report");
    read(*r, "trend_years", cfg.trend_years, "report");
  }
  read_path(j, "output_dir", cfg.output_dir, base, "config");

  cfg.ranker.validate();
  cfg.policy.validate();
  if (cfg.max_retries < 0) throw UsageError("fetch.max_retries must be nonnegative");
  if (cfg.negative.per_month_cap && *cfg.negative.per_month_cap == 0) {
    throw UsageError("fetch.negative.per_month_cap must be at least 1");
  }
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw UsageError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j, fs::absolute(path).parent_path());
}

void PipelineConfig::check_paths() const {
  std::vector<std::string> missing;
  auto need = [&](const std::optional<fs::path>& p, const char* what) {
    if (p && !fs::exists(*p)) missing.push_back(std::string(what) + " " + p->string());
  };
  need(stop_words, "tokenizer.stop_words");
  need(curation, "curation");
  need(votes, "screening.votes");
  need(trend_counts, "report.trend_counts");
  if (offline) {
    need(positive_fixture, "fetch.offline_fixtures.positive");
    need(negative_fixture, "fetch.offline_fixtures.negative");
  }
  if (!missing.empty()) {
    std::string msg = "missing input file(s):";
    for (const auto& m : missing) msg += "\n  " + m;
    throw UsageError(msg);
  }
}

json PipelineConfig::snapshot() const {
  auto redact = [](const std::optional<std::string>& v) { return v ? json("<set>") : json(nullptr); };
  json j = json::object();
  j["fetch"] = {{"positive", spec_json(positive)},
                {"negative", spec_json(negative)},
                {"requests_per_second", requests_per_second ? json(*requests_per_second) : json(nullptr)},
                {"base_url", base_url},
                {"max_retries", max_retries},
                {"email", redact(positive.credentials.email)},
                {"tool", positive.credentials.tool ? json(*positive.credentials.tool) : json(nullptr)},
                {"api_key", redact(positive.credentials.api_key)},
                {"offline", offline}};
  j["tokenizer"] = {{"min_token_length", tokenizer.min_token_length},
                    {"fold_case", tokenizer.fold_case},
                    {"stop_words", stop_words ? json(stop_words->generic_string()) : json("builtin")}};
  j["ranker"] = {{"min_p_given_p", ranker.min_p_given_p},
                 {"score_threshold", ranker.score_threshold},
                 {"merge_plurals", merge_plurals},
                 {"table_top_k", table_top_k ? json(*table_top_k) : json(nullptr)},
                 {"stats_top_k", stats_top_k}};
  j["curation"] = optional_path(curation);
  json dialect_names = json::array();
  for (auto d : dialects) dialect_names.push_back(query::to_string(d));
  j["compose"] = {{"cr_expression", cr_expression}, {"dialects", dialect_names}};
  j["policy"] = {{"majority_threshold", policy.majority_threshold},
                 {"inconclusive_max_effective", policy.inconclusive_max_effective},
                 {"expert_override_min", policy.expert_override_min}};
  j["screening"] = {{"votes", optional_path(votes)},
                    {"crowd_stage_name", crowd_stage_name},
                    {"final_name", funnel_final_name},
                    {"funnel_before", stages_json(funnel_before)},
                    {"funnel_after", stages_json(funnel_after)}};
  j["report"] = {{"trend_counts", optional_path(trend_counts)}, {"trend_years", trend_years}};
  j["output_dir"] = output_dir.generic_string();
  j["precise"] = precise;
  return j;
}

}  // namespace litsearch
