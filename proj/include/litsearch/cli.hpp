#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include "litsearch/config.hpp"
#include "litsearch/entrez.hpp"

namespace litsearch::cli {

// Process exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kExternalError = 2;

// Output file names inside output_dir.
namespace files {
inline constexpr const char* positive_corpus = "positive.jsonl";
inline constexpr const char* negative_corpus = "negative.jsonl";
inline constexpr const char* corpus_stats = "corpus_stats.json";
inline constexpr const char* top_words = "top_words.tsv";
inline constexpr const char* candidates = "candidates.tsv";
inline constexpr const char* term_table = "term_table.tsv";
inline constexpr const char* cloud = "cloud.svg";
inline constexpr const char* selected_terms = "selected_terms.txt";
inline constexpr const char* composed_query = "composed_query.txt";
inline constexpr const char* stage_report = "stage_report.json";
inline constexpr const char* funnel = "funnel.json";
inline constexpr const char* trend = "trend.csv";
inline constexpr const char* bundle = "report.json";
}  // namespace files

// Pipeline steps, usable without the argument parser. Each throws the
// library's error types; run() maps them onto exit codes.
struct Context {
  PipelineConfig config;
  std::ostream* out = nullptr;
  // Live transport override, used when not offline. Defaults to libcurl.
  std::shared_ptr<Transport> transport;
};

void cmd_fetch(Context& ctx);
void cmd_stats(Context& ctx);
void cmd_rank(Context& ctx);
void cmd_compose(Context& ctx);
void cmd_screen(Context& ctx);
void cmd_report(Context& ctx);
void cmd_run_all(Context& ctx);

// Reads a selected-terms file: one term per line, '#' comments.
std::vector<std::string> read_selected_terms(const std::filesystem::path& path);

// Full command line entry point: subcommands fetch, stats, rank, compose,
// screen, report, run-all.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace litsearch::cli
