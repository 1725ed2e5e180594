#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankaudit/data_model.hpp"
#include "rankaudit/seg_metrics.hpp"

namespace rankaudit {

struct MetricAssignment {
  MetricKind metric = MetricKind::DSC;
  // Set for NSD assignments only.
  std::optional<double> tau_mm;

  bool operator==(const MetricAssignment&) const = default;
};

class MetricPolicy {
 public:
  MetricPolicy() = default;
  explicit MetricPolicy(MetricKind default_rule) : default_rule_(default_rule) {}

  // NSD assignments without a tolerance get kDefaultToleranceMm.
  // Throws ArgumentError for a negative or non-finite tolerance.
  void assign(std::string_view target, MetricKind metric, std::optional<double> tau_mm = std::nullopt);

  MetricAssignment lookup(std::string_view target) const;
  MetricKind default_rule() const noexcept { return default_rule_; }
  const std::map<std::string, MetricAssignment, std::less<>>& mapping() const noexcept { return mapping_; }

  bool operator==(const MetricPolicy&) const = default;

 private:
  MetricKind default_rule_ = MetricKind::DSC;
  std::map<std::string, MetricAssignment, std::less<>> mapping_;
};

// Built-in organ dictionary: blob-like organs on DSC, tubular structures on
// NSD at 1.5 mm, DSC for anything unlisted.
MetricPolicy default_policy();

// Lines of `target = {metric = "DSC"|"NSD", tau_mm = <float>}` and an
// optional `default = "DSC"|"NSD"`. Throws ConfigError on malformed input.
MetricPolicy parse_policy(std::string_view text);
MetricPolicy load_policy(const std::filesystem::path& path);
std::string format_policy(const MetricPolicy& policy);

enum class SortKey { AVG_DSC, AVG_NSD, OVERALL, POLICY };
std::string_view to_string(SortKey key);
SortKey parse_sort_key(std::string_view text);

// Mean over cases; nullopt when no case has a value.
std::optional<double> method_target_mean(const ScoreTable& table, std::string_view method,
                                         std::string_view target, MetricKind metric);

struct RankedEntry {
  std::string method;
  double score = 0.0;
};

struct TargetRanking {
  std::string target;
  MetricAssignment assignment;
  std::vector<RankedEntry> ranking;  // best first
};

struct LeaderboardRow {
  std::string method;
  std::optional<std::string> family;
  std::optional<double> avg_dsc;
  std::optional<double> avg_nsd;
  std::optional<double> overall;  // (avg_dsc + avg_nsd) / 2
  std::optional<double> policy;   // mean over targets of the policy metric
  std::size_t dsc_targets = 0;
  std::size_t nsd_targets = 0;
  // Fraction of (target, metric) cells with data anywhere in the table that
  // this method covers.
  double coverage = 0.0;
};

struct Leaderboard {
  std::vector<LeaderboardRow> rows;  // ordered by sort_key
  std::vector<TargetRanking> per_target;
  SortKey sort_key = SortKey::OVERALL;
  std::vector<std::string> warnings;

  const LeaderboardRow* row(std::string_view method) const;
  // Methods best first under `key`; methods lacking the value go last.
  // Ties break by method id.
  std::vector<std::string> order(SortKey key) const;
  // 1-based rank under `key`.
  std::size_t rank(std::string_view method, SortKey key) const;
};

// Throws ValidationError for an empty table. An NSD assignment with no NSD
// scores anywhere produces a warning and an empty ranking for that target.
Leaderboard build_leaderboard(const ScoreTable& table, const MetricPolicy& policy, SortKey sort_key = SortKey::OVERALL);

struct RankChange {
  std::string method;
  std::size_t rank_a = 0;
  std::size_t rank_b = 0;
  long delta = 0;  // rank_b - rank_a; positive means the method dropped
};

struct RankChangeReport {
  SortKey key_a = SortKey::AVG_DSC;
  SortKey key_b = SortKey::AVG_NSD;
  std::size_t top_k = 0;
  std::vector<RankChange> changes;  // in key_a order
  std::size_t changed = 0;
  // The first top_k methods under key_a appear in exactly reversed order as
  // the first top_k under key_b. Never set for top_k < 2.
  bool top_k_reversal = false;
};

// Throws ArgumentError when top_k is 0 or exceeds the method count.
RankChangeReport rank_changes(const Leaderboard& lb, SortKey key_a, SortKey key_b, std::size_t top_k);

}  // namespace rankaudit
