#include "litsearch/screening.hpp"

#include <charconv>
#include <istream>
#include <unordered_map>

#include "litsearch/error.hpp"

namespace litsearch {

using nlohmann::json;

std::string to_string(ScreeningDecision d) {
  switch (d) {
    case ScreeningDecision::IncludeMajority: return "include_majority";
    case ScreeningDecision::IncludeInconclusive: return "include_inconclusive";
    case ScreeningDecision::IncludeExpertOverride: return "include_expert_override";
    case ScreeningDecision::Exclude: return "exclude";
  }
  return "exclude";
}

void ScreeningPolicy::validate() const {
  if (!(majority_threshold > 0.0 && majority_threshold <= 1.0)) {
    throw UsageError("majority_threshold must lie in (0,1]");
  }
}

ScreeningDecision decide(const VoteRecord& v, const ScreeningPolicy& p) {
  p.validate();
  if (v.expert_yes > v.yes) {
    throw UsageError("article " + v.article_id + ": expert_yes exceeds yes");
  }
  if (v.yes + v.no + v.not_sure == 0) throw UsageError("article " + v.article_id + " has no votes");

  const std::size_t effective = v.effective();
  if (effective == 0) return ScreeningDecision::IncludeInconclusive;
  if (effective <= p.inconclusive_max_effective && v.yes >= 1 && v.no >= 1) {
    return ScreeningDecision::IncludeInconclusive;
  }
  if (static_cast<double>(v.yes) / static_cast<double>(effective) >= p.majority_threshold) {
    return ScreeningDecision::IncludeMajority;
  }
  if (v.expert_yes >= p.expert_override_min && p.expert_override_min > 0) {
    return ScreeningDecision::IncludeExpertOverride;
  }
  return ScreeningDecision::Exclude;
}

std::size_t StageReport::included() const {
  return total() - count(ScreeningDecision::Exclude);
}

std::size_t StageReport::total() const {
  std::size_t n = 0;
  for (const auto& ids : articles) n += ids.size();
  return n;
}

StageReport run_stage(const std::vector<VoteRecord>& votes, const ScreeningPolicy& p) {
  p.validate();
  StageReport report;
  std::unordered_map<std::string, std::size_t> seen;
  for (const auto& v : votes) {
    if (!seen.emplace(v.article_id, 0).second) throw UsageError("duplicate article_id " + v.article_id);
    report.articles[static_cast<std::size_t>(decide(v, p))].push_back(v.article_id);
  }
  return report;
}

json stage_report_json(const StageReport& report) {
  json counts = json::object();
  json articles = json::object();
  for (ScreeningDecision d : kAllDecisions) {
    counts[to_string(d)] = report.count(d);
    articles[to_string(d)] = report.of(d);
  }
  counts["included"] = report.included();
  counts["total"] = report.total();
  json out = json::object();
  out["counts"] = std::move(counts);
  out["articles"] = std::move(articles);
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else {
      out.back() += c;
    }
  }
  for (auto& field : out) {
    auto first = field.find_first_not_of(" \t");
    auto last = field.find_last_not_of(" \t");
    field = first == std::string::npos ? std::string{} : field.substr(first, last - first + 1);
  }
  return out;
}

std::size_t parse_count(const std::string& field, const char* column, std::size_t line) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    throw SchemaError(std::string("column ") + column + ": '" + field + "' is not a nonnegative integer", line);
  }
  return value;
}

}  // namespace

std::vector<VoteRecord> read_votes_csv(std::istream& in) {
  static const std::vector<std::string> kHeader = {"article_id", "yes", "no", "not_sure", "expert_yes"};
  std::vector<VoteRecord> out;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto fields = split_csv_line(line);
    if (!header_seen) {
      if (fields != kHeader) {
        throw SchemaError("expected header article_id,yes,no,not_sure,expert_yes", line_no);
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != kHeader.size()) {
      throw SchemaError("expected 5 fields, found " + std::to_string(fields.size()), line_no);
    }
    VoteRecord v;
    v.article_id = fields[0];
    if (v.article_id.empty()) throw SchemaError("empty article_id", line_no);
    v.yes = parse_count(fields[1], "yes", line_no);
    v.no = parse_count(fields[2], "no", line_no);
    v.not_sure = parse_count(fields[3], "not_sure", line_no);
    v.expert_yes = parse_count(fields[4], "expert_yes", line_no);
    if (v.expert_yes > v.yes) throw SchemaError("expert_yes exceeds yes", line_no);
    if (v.yes + v.no + v.not_sure == 0) throw SchemaError("article " + v.article_id + " has no votes", line_no);
    if (auto [it, fresh] = first_line.emplace(v.article_id, line_no); !fresh) {
      throw SchemaError("duplicate article_id " + v.article_id + " (first seen on line " +
                            std::to_string(it->second) + ")",
                        line_no);
    }
    out.push_back(std::move(v));
  }
  if (!header_seen) throw SchemaError("missing header line", line_no ? line_no : 1);
  return out;
}

FunnelFlow funnel_export(const std::vector<FunnelStage>& stages, const std::string& final_name) {
  for (std::size_t k = 0; k < stages.size(); ++k) {
    const auto& s = stages[k];
    if (s.out_count > s.in_count) {
      throw UsageError("stage '" + s.name + "' keeps " + std::to_string(s.out_count) + " of only " +
                       std::to_string(s.in_count));
    }
    if (k > 0 && stages[k - 1].out_count != s.in_count) {
      throw UsageError("stages '" + stages[k - 1].name + "' -> '" + s.name + "' do not chain: " +
                       std::to_string(stages[k - 1].out_count) + " out vs " + std::to_string(s.in_count) + " in");
    }
  }
  FunnelFlow flow;
  if (stages.empty()) return flow;
  const std::size_t n = stages.size();
  for (const auto& s : stages) flow.nodes.push_back({s.name});
  flow.nodes.push_back({final_name});
  for (const auto& s : stages) flow.nodes.push_back({s.name + ": filtered out"});
  for (std::size_t k = 0; k < n; ++k) {
    flow.links.push_back({k, k + 1, stages[k].out_count, FunnelLink::Kind::in});
    flow.links.push_back({k, n + 1 + k, stages[k].in_count - stages[k].out_count, FunnelLink::Kind::out});
  }
  return flow;
}

json funnel_json(const FunnelFlow& flow) {
  json nodes = json::array();
  for (const auto& node : flow.nodes) nodes.push_back({{"name", node.name}});
  json links = json::array();
  for (const auto& link : flow.links) {
    json l = json::object();
    l["source"] = link.source;
    l["target"] = link.target;
    l["value"] = link.value;
    l["kind"] = link.kind == FunnelLink::Kind::in ? "in" : "out";
    links.push_back(std::move(l));
  }
  json out = json::object();
  out["nodes"] = std::move(nodes);
  out["links"] = std::move(links);
  return out;
}

}  // namespace litsearch
