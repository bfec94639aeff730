#include "litsearch/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "litsearch/error.hpp"

namespace litsearch {

using nlohmann::json;

namespace {

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

}  // namespace

std::string hash_comment_header(const ArtifactHeader& header) {
  std::string out = "# litsearch " + header.tool_version + "\n";
  out += "# config: " + header.config.dump() + "\n";
  if (header.generated_at) out += "# generated_at: " + *header.generated_at + "\n";
  for (const auto& note : header.notes) out += "# note: " + note + "\n";
  return out;
}

json header_json(const ArtifactHeader& header) {
  json j = json::object();
  j["tool"] = "litsearch";
  j["version"] = header.tool_version;
  j["config"] = header.config;
  if (header.generated_at) j["generated_at"] = *header.generated_at;
  if (!header.notes.empty()) j["notes"] = header.notes;
  return j;
}

std::string emit_term_table(std::vector<TermScore> scores, std::size_t top_k, const ArtifactHeader& header,
                            bool precise) {
  if (top_k == 0) throw UsageError("top_k must be at least 1");
  std::sort(scores.begin(), scores.end(), ranks_before);
  ArtifactHeader h = header;
  if (top_k > scores.size()) {
    h.notes.push_back("top_k=" + std::to_string(top_k) + " exceeds the " + std::to_string(scores.size()) +
                      " available terms; all emitted");
    top_k = scores.size();
  }
  std::string out = hash_comment_header(h);
  out += "word\tdf_p\tdf_n\tp_given_p\tp_given_n\tscore";
  if (precise) out += "\tp_given_p_precise\tp_given_n_precise\tscore_precise";
  out += '\n';
  for (std::size_t i = 0; i < top_k; ++i) {
    const auto& s = scores[i];
    out += s.word + '\t' + std::to_string(s.df_p) + '\t' + std::to_string(s.df_n) + '\t' + fixed3(s.p_given_p) +
           '\t' + fixed3(s.p_given_n) + '\t' + fixed3(s.score);
    if (precise) out += '\t' + full(s.p_given_p) + '\t' + full(s.p_given_n) + '\t' + full(s.score);
    out += '\n';
  }
  return out;
}

std::string emit_probability_table(const std::vector<std::pair<std::string, double>>& positive,
                                   const std::vector<std::pair<std::string, double>>& negative,
                                   const ArtifactHeader& header, bool precise) {
  std::string out = hash_comment_header(header);
  out += precise ? "rank\tword_p\tp_given_p\tword_n\tp_given_n\tp_given_p_precise\tp_given_n_precise\n"
                 : "rank\tword_p\tp_given_p\tword_n\tp_given_n\n";
  const std::size_t rows = std::max(positive.size(), negative.size());
  for (std::size_t i = 0; i < rows; ++i) {
    out += std::to_string(i + 1);
    for (const auto* side : {&positive, &negative}) {
      if (i < side->size()) out += '\t' + (*side)[i].first + '\t' + fixed3((*side)[i].second);
      else out += "\t\t";
    }
    if (precise) {
      for (const auto* side : {&positive, &negative}) {
        out += '\t';
        if (i < side->size()) out += full((*side)[i].second);
      }
    }
    out += '\n';
  }
  return out;
}

std::string xml_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

double cloud_font_size(double score, double lo, double hi, const CloudLayout& layout) {
  if (!(hi > lo)) return layout.max_font;
  return layout.min_font + (score - lo) / (hi - lo) * (layout.max_font - layout.min_font);
}

std::string emit_word_cloud(std::vector<TermScore> scores, const ArtifactHeader& header, const CloudLayout& layout) {
  if (scores.empty()) throw UsageError("word cloud needs at least one term");
  std::sort(scores.begin(), scores.end(), ranks_before);
  const double hi = scores.front().score;
  const double lo = scores.back().score;
  const std::size_t columns = std::max<std::size_t>(1, std::min(layout.columns, scores.size()));
  const std::size_t rows = (scores.size() + columns - 1) / columns;

  // A comment may not contain "--".
  std::string comment = hash_comment_header(header);
  for (auto pos = comment.find("--"); pos != std::string::npos; pos = comment.find("--", pos)) {
    comment.replace(pos, 2, "- -");
  }
  std::ostringstream out;
  out << "<!--\n" << comment << "-->\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << number(static_cast<double>(columns) * layout.cell_width)
      << "\" height=\"" << number(static_cast<double>(rows) * layout.row_height) << "\" font-family=\"sans-serif\">\n";
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const std::size_t row = i / columns;
    const std::size_t col = i % columns;
    const double x = (static_cast<double>(col) + 0.5) * layout.cell_width;
    const double y = (static_cast<double>(row) + 0.75) * layout.row_height;
    out << "  <text x=\"" << number(x) << "\" y=\"" << number(y) << "\" font-size=\""
        << number(cloud_font_size(scores[i].score, lo, hi, layout)) << "\" text-anchor=\"middle\" data-score=\""
        << fixed3(scores[i].score) << "\">" << xml_escape(scores[i].word) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

std::string emit_trend_csv(const TrendSeries& series, const ArtifactHeader& header) {
  std::string out = hash_comment_header(header);
  out += "engine,year,cumulative_count\n";
  for (const auto& [engine, points] : series) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (i > 0 && points[i].year <= points[i - 1].year) {
        throw UsageError("series '" + engine + "' is not sorted by year at " + std::to_string(points[i].year));
      }
      if (i > 0 && points[i].cumulative_count < points[i - 1].cumulative_count) {
        throw UsageError("series '" + engine + "' decreases at year " + std::to_string(points[i].year));
      }
      out += engine + ',' + std::to_string(points[i].year) + ',' + std::to_string(points[i].cumulative_count) + '\n';
    }
  }
  return out;
}

TrendSeries parse_trend_csv(std::string_view text) {
  TrendSeries series;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "engine,year,cumulative_count") {
        throw SchemaError("expected header engine,year,cumulative_count", line_no);
      }
      header_seen = true;
      continue;
    }
    auto c1 = line.find(',');
    auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos || line.find(',', c2 + 1) != std::string::npos) {
      throw SchemaError("expected 3 fields", line_no);
    }
    std::string engine = line.substr(0, c1);
    std::string_view y = std::string_view(line).substr(c1 + 1, c2 - c1 - 1);
    std::string_view c = std::string_view(line).substr(c2 + 1);
    YearCount point;
    auto r1 = std::from_chars(y.data(), y.data() + y.size(), point.year);
    auto r2 = std::from_chars(c.data(), c.data() + c.size(), point.cumulative_count);
    if (engine.empty() || r1.ec != std::errc() || r1.ptr != y.data() + y.size() || r2.ec != std::errc() ||
        r2.ptr != c.data() + c.size()) {
      throw SchemaError("malformed trend row", line_no);
    }
    series[engine].push_back(point);
  }
  for (auto& [engine, points] : series) {
    std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.year < b.year; });
  }
  return series;
}

}  // namespace litsearch
