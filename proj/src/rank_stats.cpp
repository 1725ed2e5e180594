#include "rankaudit/rank_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include <fmt/format.h>

#include "rankaudit/error.hpp"
#include "rankaudit/parallel.hpp"

namespace rankaudit {

CaseScores aggregate_per_case(const ScoreTable& table, std::string_view method, MetricKind metric) {
  const auto m = table.method_index(method);
  if (!m) throw LookupError(fmt::format("unknown method '{}'", method));
  CaseScores out;
  for (std::size_t c = 0; c < table.cases().size(); ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < table.targets().size(); ++t) {
      if (const auto s = table.score(*m, c, t, metric)) {
        sum += *s;
        ++count;
      }
    }
    if (count > 0) out.emplace(table.cases()[c], sum / static_cast<double>(count));
  }
  return out;
}

PairedSample pair(const CaseScores& xs, const CaseScores& ys) {
  PairedSample sample;
  std::size_t shared = 0;
  for (const auto& [case_id, x] : xs) {
    auto it = ys.find(case_id);
    if (it == ys.end()) continue;
    ++shared;
    const double d = x - it->second;
    if (d == 0.0) {
      ++sample.n_dropped_zero;
    } else {
      sample.diffs.push_back(d);
    }
  }
  if (shared == 0) throw InsufficientDataError("paired samples share no case");
  sample.n_used = sample.diffs.size();
  sample.n_dropped_missing = xs.size() + ys.size() - 2 * shared;
  return sample;
}

std::string_view to_string(TestMethod method) {
  switch (method) {
    case TestMethod::Exact: return "exact";
    case TestMethod::NormalApprox: return "normal-approx";
    case TestMethod::NoInformation: return "no-information";
  }
  return "?";
}

std::vector<std::uint64_t> signed_rank_null_counts(std::size_t n) {
  if (n > 62) throw ArgumentError("exact signed-rank distribution supports n <= 62");
  const std::size_t max_w = n * (n + 1) / 2;
  std::vector<std::uint64_t> counts(max_w + 1, 0);
  counts[0] = 1;
  std::size_t reach = 0;
  for (std::size_t rank = 1; rank <= n; ++rank) {
    reach += rank;
    for (std::size_t w = reach; w >= rank; --w) counts[w] += counts[w - rank];
  }
  return counts;
}

WilcoxonResult wilcoxon_one_sided(const PairedSample& sample) {
  WilcoxonResult result;
  const std::size_t n = sample.diffs.size();
  result.n_used = n;
  if (n == 0) return result;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::fabs(sample.diffs[a]) < std::fabs(sample.diffs[b]);
  });

  double w_plus = 0.0;
  double tie_term = 0.0;
  bool tied = false;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    const double mag = std::fabs(sample.diffs[order[i]]);
    while (j < n && std::fabs(sample.diffs[order[j]]) == mag) ++j;
    const double t = static_cast<double>(j - i);
    const double mid_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (sample.diffs[order[k]] > 0.0) w_plus += mid_rank;
    }
    if (j - i > 1) {
      tied = true;
      tie_term += t * t * t - t;
    }
    i = j;
  }
  result.w_plus = w_plus;

  if (!tied && n <= kExactMaxN) {
    const auto counts = signed_rank_null_counts(n);
    const auto observed = static_cast<std::size_t>(w_plus);
    std::uint64_t tail = 0;
    for (std::size_t w = observed; w < counts.size(); ++w) tail += counts[w];
    result.p_raw = std::ldexp(static_cast<double>(tail), -static_cast<int>(n));
    result.method = TestMethod::Exact;
    return result;
  }

  const double nd = static_cast<double>(n);
  const double mean = nd * (nd + 1.0) / 4.0;
  const double var = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
  const double z = (w_plus - mean - 0.5) / std::sqrt(var);
  const double p = 0.5 * std::erfc(z / std::sqrt(2.0));
  result.p_raw = std::clamp(p, std::numeric_limits<double>::min(), 1.0);
  result.method = TestMethod::NormalApprox;
  return result;
}

double bonferroni(double p_raw, std::size_t k) {
  if (!(p_raw > 0.0 && p_raw <= 1.0)) throw ArgumentError(fmt::format("p-value {} outside (0, 1]", p_raw));
  if (k < 1) throw ArgumentError("comparison count must be at least 1");
  return std::min(1.0, static_cast<double>(k) * p_raw);
}

std::string_view to_string(Tier tier) {
  switch (tier) {
    case Tier::P_LT_0_001: return "P_LT_0_001";
    case Tier::P_LT_0_01: return "P_LT_0_01";
    case Tier::P_LT_0_05: return "P_LT_0_05";
    case Tier::NOT_SIGNIFICANT: return "NOT_SIGNIFICANT";
  }
  return "?";
}

Tier classify(double p_adj, double alpha, const TierThresholds& thresholds) {
  if (!(p_adj < alpha)) return Tier::NOT_SIGNIFICANT;
  if (p_adj < thresholds.strong) return Tier::P_LT_0_001;
  if (p_adj < thresholds.medium) return Tier::P_LT_0_01;
  if (p_adj < thresholds.weak) return Tier::P_LT_0_05;
  return Tier::NOT_SIGNIFICANT;
}

bool SignificanceMap::any_significant() const {
  for (std::size_t r = 0; r < size(); ++r) {
    for (std::size_t c = 0; c < size(); ++c) {
      if (r != c && at(r, c).tier != Tier::NOT_SIGNIFICANT) return true;
    }
  }
  return false;
}

std::optional<double> method_mean_score(const ScoreTable& table, std::string_view method, MetricKind metric) {
  const CaseScores per_case = aggregate_per_case(table, method, metric);
  if (per_case.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& [c, s] : per_case) sum += s;
  return sum / static_cast<double>(per_case.size());
}

std::vector<std::string> order_methods(const ScoreTable& table, MetricKind metric, const AxisOrder& order) {
  if (order.kind == AxisOrder::Kind::Explicit) {
    std::set<std::string> given(order.explicit_order.begin(), order.explicit_order.end());
    std::set<std::string> have(table.methods().begin(), table.methods().end());
    if (given != have || given.size() != order.explicit_order.size()) {
      throw ArgumentError("explicit axis order must list every method exactly once");
    }
    return order.explicit_order;
  }

  constexpr double kNoData = -std::numeric_limits<double>::infinity();
  struct Entry {
    std::string method;
    std::string group;
    double mean;
  };
  std::vector<Entry> entries;
  std::map<std::string, std::pair<double, std::size_t>> group_sums;
  for (const auto& m : table.methods()) {
    const auto fam = table.family(m);
    // Prefixes keep singleton groups apart from real family labels.
    std::string group = fam ? "\x02" + *fam : "\x01" + m;
    const auto mean = method_mean_score(table, m, metric);
    entries.push_back({m, group, mean.value_or(kNoData)});
    auto& acc = group_sums[group];
    if (mean) {
      acc.first += *mean;
      ++acc.second;
    }
  }
  std::map<std::string, double> group_mean;
  for (const auto& [g, acc] : group_sums) {
    group_mean[g] = acc.second > 0 ? acc.first / static_cast<double>(acc.second) : kNoData;
  }
  std::sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
    const double ga = group_mean[a.group];
    const double gb = group_mean[b.group];
    if (ga != gb) return ga > gb;
    if (a.group != b.group) return a.group < b.group;
    if (a.mean != b.mean) return a.mean > b.mean;
    return a.method < b.method;
  });
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (auto& e : entries) out.push_back(std::move(e.method));
  return out;
}

SignificanceMap significance_map(const ScoreTable& table, MetricKind metric, const SignificanceOptions& options) {
  const std::size_t M = table.methods().size();
  if (M < 2) throw ConfigError(fmt::format("significance map needs at least 2 methods, table has {}", M));
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) {
    throw ArgumentError(fmt::format("alpha {} outside (0, 1)", options.alpha));
  }

  SignificanceMap map;
  map.metric = metric;
  map.alpha = options.alpha;
  map.thresholds = options.thresholds;
  map.k_comparisons = M * (M - 1) / 2;
  map.methods = order_methods(table, metric, options.order);
  std::vector<CaseScores> per_case(M);
  for (std::size_t i = 0; i < M; ++i) {
    per_case[i] = aggregate_per_case(table, map.methods[i], metric);
    map.families.push_back(table.family(map.methods[i]));
    double sum = 0.0;
    for (const auto& [c, s] : per_case[i]) sum += s;
    map.mean_scores.push_back(per_case[i].empty() ? std::numeric_limits<double>::quiet_NaN()
                                                  : sum / static_cast<double>(per_case[i].size()));
  }

  map.cells.assign(M * M, SignificanceCell{});
  parallel_for(M * M, options.workers, [&](std::size_t idx) {
    const std::size_t r = idx / M;
    const std::size_t c = idx % M;
    if (r == c) return;
    SignificanceCell cell;
    try {
      const PairedSample sample = pair(per_case[r], per_case[c]);
      const WilcoxonResult w = wilcoxon_one_sided(sample);
      cell.p_raw = w.p_raw;
      cell.w_plus = w.w_plus;
      cell.method = w.method;
      cell.n_used = sample.n_used;
      cell.n_dropped_missing = sample.n_dropped_missing;
      cell.n_dropped_zero = sample.n_dropped_zero;
    } catch (const InsufficientDataError&) {
      cell.n_dropped_missing = per_case[r].size() + per_case[c].size();
    }
    cell.p_adj = bonferroni(cell.p_raw, map.k_comparisons);
    cell.tier = classify(cell.p_adj, options.alpha, options.thresholds);
    map.cells[idx] = cell;
  });
  for (std::size_t r = 0; r < M; ++r) {
    for (std::size_t c = 0; c < M; ++c) {
      if (r != c && map.at(r, c).n_used > 0) ++map.tests_run;
    }
  }
  return map;
}

NullSimulationResult simulate_null(const NullSimulationOptions& options) {
  if (options.methods < 2) throw ArgumentError("simulation needs at least 2 methods");
  if (options.cases < 1 || options.reps < 1) throw ArgumentError("simulation needs at least 1 case and 1 repetition");
  std::mt19937_64 rng(options.seed);
  std::vector<std::string> methods, cases;
  for (std::size_t m = 0; m < options.methods; ++m) methods.push_back(fmt::format("m{:02}", m));
  for (std::size_t c = 0; c < options.cases; ++c) cases.push_back(fmt::format("c{:04}", c));

  SignificanceOptions sig;
  sig.alpha = options.alpha;
  sig.workers = options.workers;
  NullSimulationResult result;
  result.reps = options.reps;
  for (std::size_t rep = 0; rep < options.reps; ++rep) {
    ScoreTable::Builder builder;
    for (const auto& m : methods) {
      for (const auto& c : cases) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        builder.set(m, c, "target", MetricKind::DSC, u);
      }
    }
    const bool hit = significance_map(builder.build(), MetricKind::DSC, sig).any_significant();
    result.any_significant.push_back(hit);
    if (hit) ++result.reps_with_significant;
  }
  result.fwer = static_cast<double>(result.reps_with_significant) / static_cast<double>(result.reps);
  return result;
}

}  // namespace rankaudit
