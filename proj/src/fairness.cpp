#include "rankaudit/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>

#include <fmt/format.h>

#include "rankaudit/error.hpp"
#include "rankaudit/parallel.hpp"

namespace rankaudit {

std::string Subgroup::schema() const {
  std::string out;
  for (const auto& [attr, value] : selector) {
    if (!out.empty()) out += " x ";
    out += attr;
  }
  return out;
}

std::string Subgroup::label() const {
  std::string out;
  for (const auto& [attr, value] : selector) {
    if (!out.empty()) out += " & ";
    out += attr + "=" + value;
  }
  return out;
}

namespace {

// All k-element index subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> out;
  if (k == 0 || k > n) return out;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.push_back(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

}  // namespace

std::vector<Subgroup> enumerate_subgroups(const DemographicTable& meta, std::size_t min_n, std::size_t depth,
                                          bool include_unknown) {
  if (depth == 0) throw ArgumentError("subgroup depth must be at least 1");
  const std::size_t floor_n = std::max<std::size_t>(min_n, 1);
  const auto& attrs = meta.attributes();
  std::vector<Subgroup> out;
  for (std::size_t size = 1; size <= std::min(depth, attrs.size()); ++size) {
    for (const auto& subset : combinations(attrs.size(), size)) {
      std::map<std::vector<std::string>, std::vector<std::string>> groups;
      for (const auto& case_id : meta.cases()) {
        const auto& rec = meta.record(case_id);
        std::vector<std::string> key;
        bool skip = false;
        for (std::size_t a : subset) {
          if (!include_unknown && rec[a] == DemographicTable::kUnknown) skip = true;
          key.push_back(rec[a]);
        }
        if (!skip) groups[key].push_back(case_id);
      }
      for (auto& [values, members] : groups) {
        if (members.size() < floor_n) continue;
        Subgroup g;
        for (std::size_t i = 0; i < subset.size(); ++i) g.selector.emplace_back(attrs[subset[i]], values[i]);
        std::sort(members.begin(), members.end());
        g.n = members.size();
        g.members = std::move(members);
        out.push_back(std::move(g));
      }
    }
  }
  return out;
}

CaseScores case_scores(const ScoreTable& table, std::string_view method, MetricKind metric,
                       const TargetSelection& selection) {
  if (!selection.target) return aggregate_per_case(table, method, metric);
  const auto m = table.method_index(method);
  if (!m) throw LookupError(fmt::format("unknown method '{}'", method));
  const auto t = table.target_index(*selection.target);
  if (!t) throw LookupError(fmt::format("unknown target '{}'", *selection.target));
  CaseScores out;
  for (std::size_t c = 0; c < table.cases().size(); ++c) {
    if (const auto s = table.score(*m, c, *t, metric)) out.emplace(table.cases()[c], *s);
  }
  return out;
}

std::vector<double> member_scores(const CaseScores& scores, const Subgroup& group) {
  std::vector<double> out;
  for (const auto& id : group.members) {
    if (auto it = scores.find(id); it != scores.end()) out.push_back(it->second);
  }
  return out;
}

double success_rate(const ScoreTable& table, std::string_view method, MetricKind metric,
                    const TargetSelection& selection, const Subgroup& group, double t) {
  const auto scores = member_scores(case_scores(table, method, metric, selection), group);
  if (scores.empty()) {
    throw InsufficientDataError(fmt::format("group '{}' has no scored cases for '{}'", group.label(), method));
  }
  const auto hits = std::count_if(scores.begin(), scores.end(), [t](double s) { return s > t; });
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

std::string_view to_string(DpdMode mode) {
  return mode == DpdMode::RATE ? "RATE" : "MEAN";
}

DpdMode parse_dpd_mode(std::string_view text) {
  if (text == "RATE" || text == "rate") return DpdMode::RATE;
  if (text == "MEAN" || text == "mean") return DpdMode::MEAN;
  throw ArgumentError(fmt::format("unknown DPD mode '{}' (expected RATE or MEAN)", text));
}

DpdResult dpd_from_scores(std::string_view method, const CaseScores& scores, const Subgroup& a, const Subgroup& b,
                          const DpdOptions& options) {
  const auto sa = member_scores(scores, a);
  const auto sb = member_scores(scores, b);
  for (const auto* g : {&a, &b}) {
    if ((g == &a ? sa : sb).empty()) {
      throw InsufficientDataError(fmt::format("group '{}' has no scored cases for '{}'", g->label(), method));
    }
  }
  DpdResult r;
  r.method = std::string(method);
  r.group_a = a;
  r.group_b = b;
  r.mode = options.mode;
  r.threshold_t = options.t;
  r.flag_tau = options.flag_tau;
  r.n_a = sa.size();
  r.n_b = sb.size();
  if (options.mode == DpdMode::RATE) {
    const auto count = [t = options.t](const std::vector<double>& v) {
      return static_cast<std::uint64_t>(std::count_if(v.begin(), v.end(), [t](double s) { return s > t; }));
    };
    const std::uint64_t ka = count(sa), kb = count(sb);
    const std::uint64_t na = sa.size(), nb = sb.size();
    r.stat_a = static_cast<double>(ka) / static_cast<double>(na);
    r.stat_b = static_cast<double>(kb) / static_cast<double>(nb);
    const std::uint64_t lhs = ka * nb, rhs = kb * na;
    r.value = static_cast<double>(lhs > rhs ? lhs - rhs : rhs - lhs) / static_cast<double>(na * nb);
  } else {
    auto mean = [](const std::vector<double>& v) {
      double sum = 0.0;
      for (double x : v) sum += x;
      return sum / static_cast<double>(v.size());
    };
    r.stat_a = mean(sa);
    r.stat_b = mean(sb);
    r.value = std::clamp(std::fabs(r.stat_a - r.stat_b), 0.0, 1.0);
  }
  r.flagged = r.value > options.flag_tau;
  return r;
}

DpdResult dpd(const ScoreTable& table, std::string_view method, MetricKind metric, const Subgroup& a,
              const Subgroup& b, const DpdOptions& options) {
  return dpd_from_scores(method, case_scores(table, method, metric, options.selection), a, b, options);
}

FairnessReport fairness_audit(const ScoreTable& table, const DemographicTable& meta,
                              const std::vector<std::string>& methods, MetricKind metric,
                              const AuditOptions& options) {
  const auto groups = enumerate_subgroups(meta, options.min_n, options.depth, options.include_unknown);
  FairnessReport report;
  report.min_n = options.min_n;
  report.mode = options.dpd.mode;
  report.subgroups_enumerated = groups.size();

  std::vector<std::string> sorted_methods = methods;
  std::sort(sorted_methods.begin(), sorted_methods.end());
  sorted_methods.erase(std::unique(sorted_methods.begin(), sorted_methods.end()), sorted_methods.end());

  std::vector<MethodFairness> results(sorted_methods.size());
  parallel_for(sorted_methods.size(), options.workers, [&](std::size_t i) {
    const std::string& method = sorted_methods[i];
    const CaseScores scores = case_scores(table, method, metric, options.dpd.selection);
    std::vector<std::size_t> qualifying;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (member_scores(scores, groups[g]).size() >= std::max<std::size_t>(options.min_n, 1)) qualifying.push_back(g);
    }
    MethodFairness mf;
    mf.method = method;
    for (std::size_t x = 0; x < qualifying.size(); ++x) {
      for (std::size_t y = x + 1; y < qualifying.size(); ++y) {
        const Subgroup& a = groups[qualifying[x]];
        const Subgroup& b = groups[qualifying[y]];
        if (a.schema() != b.schema()) continue;
        mf.pairs.push_back(dpd_from_scores(method, scores, a, b, options.dpd));
      }
    }
    std::stable_sort(mf.pairs.begin(), mf.pairs.end(),
                     [](const DpdResult& l, const DpdResult& r) { return l.value > r.value; });
    results[i] = std::move(mf);
  });

  const bool any = std::any_of(results.begin(), results.end(), [](const MethodFairness& m) { return !m.pairs.empty(); });
  if (!any) {
    throw ConfigError(fmt::format("no subgroup pair has at least min_n = {} scored cases in each group", options.min_n));
  }
  std::stable_sort(results.begin(), results.end(), [](const MethodFairness& l, const MethodFairness& r) {
    const auto* wl = l.worst();
    const auto* wr = r.worst();
    if ((wl != nullptr) != (wr != nullptr)) return wl != nullptr;
    if (wl != nullptr && wl->value != wr->value) return wl->value < wr->value;
    return false;  // input already sorted by id
  });
  report.methods = std::move(results);
  return report;
}

}  // namespace rankaudit
