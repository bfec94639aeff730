#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace litsearch {

struct VoteRecord {
  std::string article_id;
  std::size_t yes = 0;
  std::size_t no = 0;
  std::size_t not_sure = 0;
  std::size_t expert_yes = 0;  // "Yes" votes cast by pathologists / pathology residents

  std::size_t effective() const noexcept { return yes + no; }
  friend bool operator==(const VoteRecord&, const VoteRecord&) = default;
};

enum class ScreeningDecision { IncludeMajority, IncludeInconclusive, IncludeExpertOverride, Exclude };

inline constexpr std::array<ScreeningDecision, 4> kAllDecisions = {
    ScreeningDecision::IncludeMajority, ScreeningDecision::IncludeInconclusive,
    ScreeningDecision::IncludeExpertOverride, ScreeningDecision::Exclude};

std::string to_string(ScreeningDecision d);
inline bool is_included(ScreeningDecision d) { return d != ScreeningDecision::Exclude; }

struct ScreeningPolicy {
  double majority_threshold = 0.5;           // inclusive, on yes / (yes + no)
  std::size_t inconclusive_max_effective = 2;
  std::size_t expert_override_min = 1;

  void validate() const;
};

// "Not Sure" answers are ignored. Rules, first match wins:
//   split vote with few effective votes  -> IncludeInconclusive
//   yes share >= threshold               -> IncludeMajority
//   enough expert "Yes" votes            -> IncludeExpertOverride
//   otherwise                            -> Exclude
// An article whose every answer was "Not Sure" is IncludeInconclusive.
ScreeningDecision decide(const VoteRecord& v, const ScreeningPolicy& p);

struct StageReport {
  std::array<std::vector<std::string>, 4> articles;  // indexed by ScreeningDecision

  const std::vector<std::string>& of(ScreeningDecision d) const {
    return articles[static_cast<std::size_t>(d)];
  }
  std::size_t count(ScreeningDecision d) const { return of(d).size(); }
  std::size_t included() const;
  std::size_t total() const;
};

StageReport run_stage(const std::vector<VoteRecord>& votes, const ScreeningPolicy& p);

nlohmann::json stage_report_json(const StageReport& report);

// CSV with header article_id,yes,no,not_sure,expert_yes. Errors carry
// 1-based line numbers (the header is line 1).
std::vector<VoteRecord> read_votes_csv(std::istream& in);

struct FunnelStage {
  std::string name;
  std::size_t in_count = 0;
  std::size_t out_count = 0;
};

struct FunnelNode {
  std::string name;
  friend bool operator==(const FunnelNode&, const FunnelNode&) = default;
};

struct FunnelLink {
  std::size_t source = 0;  // node index
  std::size_t target = 0;
  std::size_t value = 0;
  enum class Kind { in, out } kind = Kind::in;
  friend bool operator==(const FunnelLink&, const FunnelLink&) = default;
};

struct FunnelFlow {
  std::vector<FunnelNode> nodes;
  std::vector<FunnelLink> links;
};

// Node k is the pool entering stage k, followed by one "filtered out" node
// per stage and a final node for whatever survives the last stage. Each
// stage emits its "in" link then its "out" link.
FunnelFlow funnel_export(const std::vector<FunnelStage>& stages, const std::string& final_name = "selected");

// {"nodes":[{"name"}],"links":[{"source","target","value","kind"}]}
nlohmann::json funnel_json(const FunnelFlow& flow);

}  // namespace litsearch
