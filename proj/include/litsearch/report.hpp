#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "litsearch/entrez.hpp"
#include "litsearch/ranker.hpp"

namespace litsearch {

// Provenance written at the top of every emitted file.
struct ArtifactHeader {
  std::string tool_version = LITSEARCH_VERSION;
  nlohmann::json config = nlohmann::json::object();
  std::optional<std::string> generated_at;  // omitted when unset
  std::vector<std::string> notes;
};

// "# ..." lines ending in a newline.
std::string hash_comment_header(const ArtifactHeader& header);

// Same content as the comment header, for JSON artifacts.
nlohmann::json header_json(const ArtifactHeader& header);

// Rows sorted by ranks_before; probabilities at three decimals. With
// `precise`, full-precision copies follow in extra columns.
std::string emit_term_table(std::vector<TermScore> scores, std::size_t top_k, const ArtifactHeader& header,
                            bool precise = false);

// Side by side: the most probable words of each corpus.
std::string emit_probability_table(const std::vector<std::pair<std::string, double>>& positive,
                                   const std::vector<std::pair<std::string, double>>& negative,
                                   const ArtifactHeader& header, bool precise = false);

struct CloudLayout {
  double min_font = 12.0;
  double max_font = 48.0;
  std::size_t columns = 5;
  double cell_width = 260.0;
  double row_height = 64.0;
};

// Font size linear in score across [min_font, max_font]; grid placement in
// score order.
double cloud_font_size(double score, double lo, double hi, const CloudLayout& layout = {});
std::string emit_word_cloud(std::vector<TermScore> scores, const ArtifactHeader& header,
                            const CloudLayout& layout = {});

using TrendSeries = std::map<std::string, std::vector<YearCount>>;

// engine,year,cumulative_count. Throws UsageError on unsorted or decreasing series.
std::string emit_trend_csv(const TrendSeries& series, const ArtifactHeader& header);

// Reads the same long format (comments allowed), merging into `series`.
TrendSeries parse_trend_csv(std::string_view text);

std::string xml_escape(std::string_view text);

}  // namespace litsearch
