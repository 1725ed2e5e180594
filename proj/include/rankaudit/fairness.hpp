#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rankaudit/data_model.hpp"
#include "rankaudit/rank_stats.hpp"

namespace rankaudit {

// A cohort fixed by one value per attribute in `selector`, attributes in
// the table's attribute order.
struct Subgroup {
  std::vector<std::pair<std::string, std::string>> selector;
  std::vector<std::string> members;  // sorted case ids
  std::size_t n = 0;

  // "sex" or "sex x race".
  std::string schema() const;
  // "sex=F" or "sex=F & race=B".
  std::string label() const;
};

// Every value combination over every attribute subset of size 1..depth with
// at least max(min_n, 1) members. Order: subsets by size then attribute
// position, values lexicographically. Throws ArgumentError for depth 0.
std::vector<Subgroup> enumerate_subgroups(const DemographicTable& meta, std::size_t min_n, std::size_t depth,
                                          bool include_unknown = false);

// Which score stands for a case: the mean over all targets with a value, or
// a single named target.
struct TargetSelection {
  std::optional<std::string> target;
};

// Per-case scores of one method under a target selection. Throws LookupError
// for an unknown method or target.
CaseScores case_scores(const ScoreTable& table, std::string_view method, MetricKind metric,
                       const TargetSelection& selection = {});

// Scores of the group's members that have one, in member order.
std::vector<double> member_scores(const CaseScores& scores, const Subgroup& group);

// Fraction of scored group members with score > t. Throws
// InsufficientDataError (naming the group) when no member is scored.
double success_rate(const ScoreTable& table, std::string_view method, MetricKind metric,
                    const TargetSelection& selection, const Subgroup& group, double t);

enum class DpdMode { RATE, MEAN };
std::string_view to_string(DpdMode mode);
DpdMode parse_dpd_mode(std::string_view text);

inline constexpr double kDefaultSuccessThreshold = 0.8;
inline constexpr double kDefaultFlagTau = 0.10;
inline constexpr std::size_t kDefaultMinN = 40;
inline constexpr std::size_t kDefaultDepth = 2;

struct DpdOptions {
  DpdMode mode = DpdMode::RATE;
  double t = kDefaultSuccessThreshold;
  double flag_tau = kDefaultFlagTau;
  TargetSelection selection;
};

struct DpdResult {
  std::string method;
  Subgroup group_a, group_b;
  DpdMode mode = DpdMode::RATE;
  double threshold_t = kDefaultSuccessThreshold;
  double flag_tau = kDefaultFlagTau;
  double value = 0.0;
  bool flagged = false;
  // Scored members and the per-group statistic (rate or mean).
  std::size_t n_a = 0, n_b = 0;
  double stat_a = 0.0, stat_b = 0.0;
};

// |rate_a - rate_b| (the rate difference is formed from exact success
// counts) or |mean_a - mean_b|; flagged iff value > flag_tau.
DpdResult dpd(const ScoreTable& table, std::string_view method, MetricKind metric, const Subgroup& a,
              const Subgroup& b, const DpdOptions& options = {});

// Same computation on already extracted per-case scores.
DpdResult dpd_from_scores(std::string_view method, const CaseScores& scores, const Subgroup& a, const Subgroup& b,
                          const DpdOptions& options);

struct AuditOptions {
  DpdOptions dpd;
  std::size_t min_n = kDefaultMinN;
  std::size_t depth = kDefaultDepth;
  bool include_unknown = false;
  std::size_t workers = 1;
};

struct MethodFairness {
  std::string method;
  std::vector<DpdResult> pairs;  // descending by value; pairs.front() is the worst
  const DpdResult* worst() const { return pairs.empty() ? nullptr : &pairs.front(); }
};

struct FairnessReport {
  // Ascending by worst-pair DPD (most equitable first), ties by method id.
  // Methods without any qualifying pair come last.
  std::vector<MethodFairness> methods;
  std::size_t min_n = kDefaultMinN;
  DpdMode mode = DpdMode::RATE;
  std::size_t subgroups_enumerated = 0;
};

// Pairs are formed only between subgroups sharing the same attribute set.
// min_n is applied to the metadata and again per method after joining with
// that method's scored cases. Throws ConfigError naming min_n when no method
// has a qualifying pair.
FairnessReport fairness_audit(const ScoreTable& table, const DemographicTable& meta,
                              const std::vector<std::string>& methods, MetricKind metric,
                              const AuditOptions& options = {});

}  // namespace rankaudit
