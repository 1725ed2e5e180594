#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankaudit/data_model.hpp"

namespace rankaudit {

using CaseScores = std::map<std::string, double>;

// Per case, the unweighted mean of the method's scores over every target
// that has a value. Cases without any value are absent.
// Throws LookupError for an unknown method.
CaseScores aggregate_per_case(const ScoreTable& table, std::string_view method, MetricKind metric);

struct PairedSample {
  std::vector<double> diffs;  // x - y, zero differences removed
  std::size_t n_used = 0;
  std::size_t n_dropped_missing = 0;  // cases present in only one of the maps
  std::size_t n_dropped_zero = 0;
};

// Throws InsufficientDataError when the maps share no case.
PairedSample pair(const CaseScores& xs, const CaseScores& ys);

enum class TestMethod { Exact, NormalApprox, NoInformation };
std::string_view to_string(TestMethod method);

struct WilcoxonResult {
  double w_plus = 0.0;
  std::size_t n_used = 0;
  double p_raw = 1.0;
  TestMethod method = TestMethod::NoInformation;
};

// Largest sample size handled by exact enumeration (tie-free samples only).
inline constexpr std::size_t kExactMaxN = 25;

// Null distribution of the signed-rank statistic for n untied ranks:
// entry w counts the sign assignments (out of 2^n) with W+ = w.
// Throws ArgumentError for n > 62.
std::vector<std::uint64_t> signed_rank_null_counts(std::size_t n);

// One-sided test of "x tends to exceed y": p = P(W+ >= observed) under the
// null. Exact for tie-free samples up to kExactMaxN, otherwise a normal
// approximation with tie-corrected variance and a 0.5 continuity correction.
// An empty sample yields p = 1 flagged NoInformation.
WilcoxonResult wilcoxon_one_sided(const PairedSample& sample);

// min(1, k p). Throws ArgumentError unless 0 < p <= 1 and k >= 1.
double bonferroni(double p_raw, std::size_t k);

enum class Tier { P_LT_0_001, P_LT_0_01, P_LT_0_05, NOT_SIGNIFICANT };
std::string_view to_string(Tier tier);

struct TierThresholds {
  double strong = 0.001;
  double medium = 0.01;
  double weak = 0.05;
};

// Strict thresholds on the adjusted p-value. Values at or above alpha are
// NOT_SIGNIFICANT regardless of the thresholds.
Tier classify(double p_adj, double alpha = 0.05, const TierThresholds& thresholds = {});

struct AxisOrder {
  enum class Kind { FamilyThenMean, Explicit };
  Kind kind = Kind::FamilyThenMean;
  std::vector<std::string> explicit_order;

  static AxisOrder family_then_mean() { return {}; }
  static AxisOrder given(std::vector<std::string> order) { return {Kind::Explicit, std::move(order)}; }
};

struct SignificanceCell {
  double p_raw = 1.0;
  double p_adj = 1.0;
  Tier tier = Tier::NOT_SIGNIFICANT;
  double w_plus = 0.0;
  TestMethod method = TestMethod::NoInformation;
  std::size_t n_used = 0;
  std::size_t n_dropped_missing = 0;
  std::size_t n_dropped_zero = 0;
};

// Row method asserted better than column method. Diagonal cells are unused.
struct SignificanceMap {
  std::vector<std::string> methods;
  std::vector<std::optional<std::string>> families;  // parallel to methods
  std::vector<double> mean_scores;                   // parallel to methods
  std::vector<SignificanceCell> cells;               // row-major M x M
  MetricKind metric = MetricKind::DSC;
  double alpha = 0.05;
  TierThresholds thresholds;
  std::size_t k_comparisons = 0;
  // Off-diagonal cells whose test carried information (n_used > 0).
  std::size_t tests_run = 0;

  std::size_t size() const noexcept { return methods.size(); }
  const SignificanceCell& at(std::size_t row, std::size_t col) const { return cells[row * methods.size() + col]; }
  bool any_significant() const;
};

// Mean over cases of the per-case aggregate, or nullopt with no data.
std::optional<double> method_mean_score(const ScoreTable& table, std::string_view method, MetricKind metric);

// Axis order: families by mean of member means (descending), then methods by
// mean within a family; methods without a family form their own family.
// Ties break by id. An explicit order must be a permutation of the table's
// methods (ArgumentError otherwise).
std::vector<std::string> order_methods(const ScoreTable& table, MetricKind metric, const AxisOrder& order);

struct SignificanceOptions {
  double alpha = 0.05;
  TierThresholds thresholds;
  AxisOrder order;
  std::size_t workers = 1;
};

// Throws ConfigError with fewer than two methods and ArgumentError for an
// alpha outside (0, 1).
SignificanceMap significance_map(const ScoreTable& table, MetricKind metric, const SignificanceOptions& options = {});

struct NullSimulationOptions {
  std::size_t methods = 5;
  std::size_t cases = 50;
  std::size_t reps = 200;
  std::uint64_t seed = 0;
  double alpha = 0.05;
  std::size_t workers = 1;
};

struct NullSimulationResult {
  std::size_t reps = 0;
  std::size_t reps_with_significant = 0;
  double fwer = 0.0;
  std::vector<bool> any_significant;  // per repetition
};

// Draws every (method, case) score i.i.d. uniform on [0, 1) from a
// mt19937_64 stream, builds the significance map per repetition and counts
// repetitions with at least one significant cell.
NullSimulationResult simulate_null(const NullSimulationOptions& options);

}  // namespace rankaudit
