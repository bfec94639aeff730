#include "litsearch/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "litsearch/curl_transport.hpp"
#include "litsearch/error.hpp"
#include "litsearch/query.hpp"
#include "litsearch/report.hpp"

namespace litsearch::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ostream& out_of(Context& ctx) {
  static std::ostringstream sink;
  return ctx.out ? *ctx.out : sink;
}

// SOURCE_DATE_EPOCH pins the stamp for reproducible output.
std::string generated_at() {
  std::time_t t;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH"); epoch && *epoch) {
    t = static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10));
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ArtifactHeader make_header(const Context& ctx) {
  ArtifactHeader h;
  h.config = ctx.config.snapshot();
  h.generated_at = generated_at();
  return h;
}

fs::path output_path(const Context& ctx, const char* name) { return ctx.config.output_dir / name; }

void write_file(const fs::path& path, const std::string& content) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << content;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

void write_json(const fs::path& path, const json& j) { write_file(path, j.dump(2) + "\n"); }

TokenizerConfig tokenizer_config(const PipelineConfig& cfg) {
  TokenizerConfig t = cfg.tokenizer;
  if (cfg.stop_words) t.stop_words = load_stop_words(*cfg.stop_words);
  return t;
}

Corpus load_labeled(const fs::path& path, CorpusLabel::Kind expected) {
  if (!fs::exists(path)) {
    throw UsageError("corpus file " + path.string() + " not found; run the fetch step first");
  }
  Corpus c = load_corpus(path);
  if (c.label().kind() != expected) {
    throw UsageError(path.string() + " is labeled '" + c.label().name() + "', expected '" +
                     (expected == CorpusLabel::Kind::positive ? "positive" : "negative") + "'");
  }
  return c;
}

struct Tables {
  DocFrequencyTable positive;
  DocFrequencyTable negative;
};

Tables count_corpora(const Context& ctx, std::optional<Corpus>* keep_pos = nullptr,
                     std::optional<Corpus>* keep_neg = nullptr) {
  Corpus pos = load_labeled(output_path(ctx, files::positive_corpus), CorpusLabel::Kind::positive);
  Corpus neg = load_labeled(output_path(ctx, files::negative_corpus), CorpusLabel::Kind::negative);
  if (pos.empty()) throw UsageError("positive corpus is empty");
  if (neg.empty()) throw UsageError("negative corpus is empty");
  const TokenizerConfig tok = tokenizer_config(ctx.config);
  Tables t{doc_frequency(pos, tok, 0), doc_frequency(neg, tok, 0)};
  if (keep_pos) keep_pos->emplace(std::move(pos));
  if (keep_neg) keep_neg->emplace(std::move(neg));
  return t;
}

std::shared_ptr<Transport> live_transport(Context& ctx) {
  if (!ctx.transport) ctx.transport = std::make_shared<CurlTransport>();
  return ctx.transport;
}

EntrezClient make_client(Context& ctx) {
  ClientOptions opts;
  opts.credentials = ctx.config.positive.credentials;
  opts.requests_per_second = ctx.config.requests_per_second;
  opts.base_url = ctx.config.base_url;
  opts.retry.max_retries = ctx.config.max_retries;
  return EntrezClient(live_transport(ctx), opts);
}

json stats_json(const VocabularyStats& s) {
  return {{"n_docs", s.n_docs},
          {"distinct_words_all", s.distinct_words_all},
          {"distinct_words_filtered", s.distinct_words_filtered},
          {"token_occurrences_all", s.token_occurrences_all},
          {"token_occurrences_filtered", s.token_occurrences_filtered}};
}

}  // namespace

void cmd_fetch(Context& ctx) {
  auto& out = out_of(ctx);
  const auto& cfg = ctx.config;
  const fs::path pos_path = output_path(ctx, files::positive_corpus);
  const fs::path neg_path = output_path(ctx, files::negative_corpus);
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw IoError("cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());

  if (cfg.offline) {
    struct Item {
      const fs::path& from;
      const fs::path& to;
      CorpusLabel::Kind kind;
    };
    for (const Item& item : {Item{cfg.positive_fixture, pos_path, CorpusLabel::Kind::positive},
                             Item{cfg.negative_fixture, neg_path, CorpusLabel::Kind::negative}}) {
      Corpus c = load_labeled(item.from, item.kind);
      if (fs::absolute(item.from) != fs::absolute(item.to)) {
        fs::copy_file(item.from, item.to, fs::copy_options::overwrite_existing, ec);
        if (ec) throw IoError("cannot copy " + item.from.string() + ": " + ec.message());
      }
      out << c.label().name() << ": " << c.n_docs() << " documents -> " << item.to.string() << "\n";
    }
    return;
  }

  EntrezClient client = make_client(ctx);
  Corpus pos = build_positive_corpus(client, cfg.positive);
  save_corpus(pos, pos_path);
  out << "positive: " << pos.n_docs() << " documents -> " << pos_path.string() << "\n";
  Corpus neg = build_negative_corpus(client, cfg.negative);
  save_corpus(neg, neg_path);
  out << "negative: " << neg.n_docs() << " documents -> " << neg_path.string() << "\n";
}

void cmd_stats(Context& ctx) {
  auto& out = out_of(ctx);
  std::optional<Corpus> pos, neg;
  Tables tables = count_corpora(ctx, &pos, &neg);
  const TokenizerConfig tok = tokenizer_config(ctx.config);
  const VocabularyStats ps = vocabulary_stats(*pos, tok);
  const VocabularyStats ns = vocabulary_stats(*neg, tok);

  json j = json::object();
  j["meta"] = header_json(make_header(ctx));
  j["positive"] = stats_json(ps);
  j["negative"] = stats_json(ns);
  write_json(output_path(ctx, files::corpus_stats), j);

  const std::size_t k = ctx.config.stats_top_k;
  write_file(output_path(ctx, files::top_words),
             emit_probability_table(most_probable_words(tables.positive, k), most_probable_words(tables.negative, k),
                                    make_header(ctx), ctx.config.precise));
  out << "positive: " << ps.n_docs << " documents, " << ps.distinct_words_all << " distinct words ("
      << ps.distinct_words_filtered << " after stop-word removal)\n";
  out << "negative: " << ns.n_docs << " documents, " << ns.distinct_words_all << " distinct words ("
      << ns.distinct_words_filtered << " after stop-word removal)\n";
}

void cmd_rank(Context& ctx) {
  auto& out = out_of(ctx);
  const auto& cfg = ctx.config;
  Tables tables = count_corpora(ctx);
  std::vector<TermScore> candidates = score_terms(tables.positive, tables.negative, cfg.ranker);

  CurationList curation = cfg.curation ? load_curation(*cfg.curation) : CurationList{};
  curation.merge_plurals = cfg.merge_plurals;
  std::vector<SelectedTerm> selected = select_terms(candidates, cfg.ranker, curation);

  std::vector<TermScore> rows;
  std::string term_list;
  for (const auto& s : selected) {
    term_list += s.term + "\n";
    if (s.score) {
      rows.push_back(*s.score);
      continue;
    }
    std::string base = s.term.back() == '*' ? s.term.substr(0, s.term.size() - 1) : s.term;
    if (tables.positive.count(base) > 0) {
      TermScore t = score_word(tables.positive, tables.negative, base);
      t.word = s.term;
      rows.push_back(std::move(t));
    }
  }

  const ArtifactHeader header = make_header(ctx);
  write_file(output_path(ctx, files::candidates),
             emit_term_table(candidates, candidates.size(), header, cfg.precise));
  write_file(output_path(ctx, files::term_table),
             emit_term_table(rows, cfg.table_top_k.value_or(std::max<std::size_t>(rows.size(), 1)), header,
                             cfg.precise));
  write_file(output_path(ctx, files::cloud), emit_word_cloud(rows, header));
  write_file(output_path(ctx, files::selected_terms), hash_comment_header(header) + term_list);

  out << candidates.size() << " candidate words, " << selected.size() << " selected\n";
}

std::vector<std::string> read_selected_terms(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read " + path.string() + "; run the rank step first");
  std::vector<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    terms.push_back(line);
  }
  if (terms.empty()) throw UsageError(path.string() + " lists no terms");
  return terms;
}

void cmd_compose(Context& ctx) {
  auto& out = out_of(ctx);
  const auto& cfg = ctx.config;
  query::Expr cr = query::parse(cfg.cr_expression);
  query::Expr topic = query::or_of_terms(read_selected_terms(output_path(ctx, files::selected_terms)));
  query::Expr combined = query::and_combine(std::move(cr), std::move(topic));

  std::string body;
  for (query::Dialect d : cfg.dialects) {
    std::string text = query::serialize(combined, d);
    out << text << "\n";
    body += query::to_string(d) + "\t" + text + "\n";
  }
  write_file(output_path(ctx, files::composed_query), hash_comment_header(make_header(ctx)) + body);
}

void cmd_screen(Context& ctx) {
  auto& out = out_of(ctx);
  const auto& cfg = ctx.config;
  if (!cfg.votes) throw UsageError("no vote file given (--votes or screening.votes)");
  std::ifstream in(*cfg.votes, std::ios::binary);
  if (!in) throw UsageError("cannot read vote file " + cfg.votes->string());
  std::vector<VoteRecord> votes;
  try {
    votes = read_votes_csv(in);
  } catch (const SchemaError& e) {
    throw SchemaError(cfg.votes->string() + ": " + e.what(), e.line());
  }
  StageReport report = run_stage(votes, cfg.policy);

  const ArtifactHeader header = make_header(ctx);
  json rj = stage_report_json(report);
  rj["meta"] = header_json(header);
  write_json(output_path(ctx, files::stage_report), rj);

  std::vector<FunnelStage> stages = cfg.funnel_before;
  stages.push_back({cfg.crowd_stage_name, votes.size(), report.included()});
  stages.insert(stages.end(), cfg.funnel_after.begin(), cfg.funnel_after.end());
  json fj = funnel_json(funnel_export(stages, cfg.funnel_final_name));
  fj["meta"] = header_json(header);
  write_json(output_path(ctx, files::funnel), fj);

  for (ScreeningDecision d : kAllDecisions) out << to_string(d) << ": " << report.count(d) << "\n";
  out << "included: " << report.included() << " of " << report.total() << "\n";
}

void cmd_report(Context& ctx) {
  auto& out = out_of(ctx);
  const auto& cfg = ctx.config;
  TrendSeries series;
  if (cfg.trend_counts) {
    std::ifstream in(*cfg.trend_counts, std::ios::binary);
    if (!in) throw UsageError("cannot read trend counts " + cfg.trend_counts->string());
    std::ostringstream buf;
    buf << in.rdbuf();
    series = parse_trend_csv(buf.str());
  }
  if (!cfg.offline && !cfg.trend_years.empty()) {
    EntrezClient client = make_client(ctx);
    series["pubmed"] = count_by_year(client, cfg.cr_expression, cfg.trend_years);
  }
  const ArtifactHeader header = make_header(ctx);
  write_file(output_path(ctx, files::trend), emit_trend_csv(series, header));

  auto present = [&](const char* name) {
    return fs::exists(output_path(ctx, name)) ? json(name) : json(nullptr);
  };
  json bundle = json::object();
  bundle["term_table_path"] = present(files::term_table);
  bundle["cloud_path"] = present(files::cloud);
  bundle["trend_path"] = files::trend;
  bundle["funnel_path"] = present(files::funnel);
  bundle["generated_at"] = *header.generated_at;
  bundle["config_snapshot"] = header.config;
  bundle["meta"] = header_json(header);
  write_json(output_path(ctx, files::bundle), bundle);
  out << "trend series: " << series.size() << " engine(s) -> " << output_path(ctx, files::trend).string() << "\n";
}

void cmd_run_all(Context& ctx) {
  cmd_fetch(ctx);
  cmd_stats(ctx);
  cmd_rank(ctx);
  cmd_compose(ctx);
  if (ctx.config.votes) cmd_screen(ctx);
  cmd_report(ctx);
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Systematic literature search toolkit: corpora, term mining, query composition, screening"};
  app.set_version_flag("--version", std::string(LITSEARCH_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  bool offline = false;
  bool precise = false;
  bool verbose = false;
  std::vector<std::string> dialects;
  std::string output_dir;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_flag("--offline", offline, "Use bundled fixture corpora; never touch the network");
  app.add_option("--dialect", dialects, "Query dialect(s): generic, pubmed, embase, cinahl")
      ->check(CLI::IsMember({"generic", "pubmed", "embase", "cinahl"}));
  app.add_option("--output-dir", output_dir, "Directory for every artifact");
  app.add_flag("--precise", precise, "Add full-precision columns to probability tables");
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  std::string cr_expr;
  std::string votes;
  std::size_t top_k = 0;
  auto* fetch = app.add_subcommand("fetch", "Build and save the positive and negative corpora");
  auto* stats = app.add_subcommand("stats", "Corpus sizes, vocabulary counts and most probable words");
  stats->add_option("--top-k", top_k, "Rows in the most-probable-words table");
  auto* rank = app.add_subcommand("rank", "Score words, apply thresholds and curation, emit tables and cloud");
  auto* compose = app.add_subcommand("compose", "AND-combine an expression with the OR of the selected terms");
  compose->add_option("--cr-expr", cr_expr, "Boolean expression to combine with the selected terms");
  auto* screen = app.add_subcommand("screen", "Aggregate screening votes and export the selection funnel");
  screen->add_option("--votes", votes, "CSV: article_id,yes,no,not_sure,expert_yes");
  auto* report = app.add_subcommand("report", "Trend series and the report bundle manifest");
  auto* run_all = app.add_subcommand("run-all", "fetch, stats, rank, compose, screen, report");
  run_all->add_option("--cr-expr", cr_expr, "Boolean expression to combine with the selected terms");
  run_all->add_option("--votes", votes, "Vote CSV for the screening step");
  for (auto* sub : {fetch, stats, rank, compose, screen, report, run_all}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsageError;
  }

  auto logger = spdlog::get("litsearch");
  if (!logger) logger = spdlog::stderr_color_mt("litsearch");
  spdlog::set_default_logger(logger);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);

  try {
    Context ctx;
    ctx.out = &out;
    if (!config_path.empty()) ctx.config = load_config(config_path);
    auto& cfg = ctx.config;
    if (offline) cfg.offline = true;
    if (precise) cfg.precise = true;
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (!dialects.empty()) {
      cfg.dialects.clear();
      for (const auto& d : dialects) cfg.dialects.push_back(query::dialect_from_string(d));
    }
    if (!cr_expr.empty()) cfg.cr_expression = cr_expr;
    if (!votes.empty()) cfg.votes = votes;
    if (top_k > 0) cfg.stats_top_k = top_k;
    cfg.check_paths();

    if (*fetch) cmd_fetch(ctx);
    else if (*stats) cmd_stats(ctx);
    else if (*rank) cmd_rank(ctx);
    else if (*compose) cmd_compose(ctx);
    else if (*screen) cmd_screen(ctx);
    else if (*report) cmd_report(ctx);
    else if (*run_all) cmd_run_all(ctx);
    return kOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const SchemaError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const NetworkError& e) {
    err << "network error: " << e.what() << "\n";
    return kExternalError;
  } catch (const ServiceError& e) {
    err << "service error: " << e.what() << "\n";
    return kExternalError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExternalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExternalError;
  }
}

}  // namespace litsearch::cli
