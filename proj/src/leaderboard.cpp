#include "rankaudit/leaderboard.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "rankaudit/error.hpp"
#include "rankaudit/structured_text.hpp"

namespace rankaudit {

void MetricPolicy::assign(std::string_view target, MetricKind metric, std::optional<double> tau_mm) {
  MetricAssignment a{metric, std::nullopt};
  if (metric == MetricKind::NSD) {
    const double tau = tau_mm.value_or(kDefaultToleranceMm);
    a.tau_mm = Tolerance(tau).mm();
  }
  mapping_.insert_or_assign(std::string(target), a);
}

MetricAssignment MetricPolicy::lookup(std::string_view target) const {
  if (auto it = mapping_.find(target); it != mapping_.end()) return it->second;
  MetricAssignment a{default_rule_, std::nullopt};
  if (default_rule_ == MetricKind::NSD) a.tau_mm = kDefaultToleranceMm;
  return a;
}

MetricPolicy default_policy() {
  MetricPolicy p(MetricKind::DSC);
  for (const char* t : {"heart", "liver", "kidney_left", "kidney_right", "spleen", "stomach", "tumor"}) {
    p.assign(t, MetricKind::DSC);
  }
  for (const char* t : {"aorta", "postcava", "vessels", "airways", "ducts", "spinal_cord"}) {
    p.assign(t, MetricKind::NSD, kDefaultToleranceMm);
  }
  return p;
}

MetricPolicy parse_policy(std::string_view text) {
  const StDocument doc = parse_structured_text(text);
  MetricPolicy policy;
  if (const StEntry* d = doc.find("default")) {
    try {
      policy = MetricPolicy(parse_metric_kind(d->value.as_string("default")));
    } catch (const ValidationError& e) {
      throw ConfigError(fmt::format("line {}: {}", d->line, e.what()));
    }
  }
  for (const auto& e : doc.entries) {
    if (e.key == "default") continue;
    if (e.value.kind != StValue::Kind::Table) {
      throw ConfigError(fmt::format("line {}: target '{}' needs an inline table", e.line, e.key));
    }
    for (const auto& k : e.value.keys) {
      if (k != "metric" && k != "tau_mm") throw ConfigError(fmt::format("line {}: unknown key '{}'", e.line, k));
    }
    const StValue* metric = e.value.find("metric");
    if (metric == nullptr) throw ConfigError(fmt::format("line {}: target '{}' has no metric", e.line, e.key));
    std::optional<double> tau;
    if (const StValue* t = e.value.find("tau_mm")) tau = t->as_number(e.key);
    try {
      const MetricKind kind = parse_metric_kind(metric->as_string(e.key));
      policy.assign(e.key, kind, tau);
    } catch (const Error& err) {
      throw ConfigError(fmt::format("line {}: {}", e.line, err.what()));
    }
  }
  return policy;
}

MetricPolicy load_policy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_policy(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::string format_policy(const MetricPolicy& policy) {
  std::string out = fmt::format("default = \"{}\"\n", to_string(policy.default_rule()));
  for (const auto& [target, a] : policy.mapping()) {
    if (a.tau_mm) {
      out += fmt::format("{} = {{metric = \"{}\", tau_mm = {}}}\n", quote_string(target), to_string(a.metric),
                         *a.tau_mm);
    } else {
      out += fmt::format("{} = {{metric = \"{}\"}}\n", quote_string(target), to_string(a.metric));
    }
  }
  return out;
}

std::string_view to_string(SortKey key) {
  switch (key) {
    case SortKey::AVG_DSC: return "AVG_DSC";
    case SortKey::AVG_NSD: return "AVG_NSD";
    case SortKey::OVERALL: return "OVERALL";
    case SortKey::POLICY: return "POLICY";
  }
  return "?";
}

SortKey parse_sort_key(std::string_view text) {
  for (SortKey k : {SortKey::AVG_DSC, SortKey::AVG_NSD, SortKey::OVERALL, SortKey::POLICY}) {
    if (to_string(k) == text) return k;
  }
  throw ArgumentError(fmt::format("unknown sort key '{}'", text));
}

std::optional<double> method_target_mean(const ScoreTable& table, std::string_view method, std::string_view target,
                                         MetricKind metric) {
  const auto m = table.method_index(method);
  const auto t = table.target_index(target);
  if (!m || !t) return std::nullopt;
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t c = 0; c < table.cases().size(); ++c) {
    if (const auto s = table.score(*m, c, *t, metric)) {
      sum += *s;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

namespace {

std::optional<double> key_value(const LeaderboardRow& row, SortKey key) {
  switch (key) {
    case SortKey::AVG_DSC: return row.avg_dsc;
    case SortKey::AVG_NSD: return row.avg_nsd;
    case SortKey::OVERALL: return row.overall;
    case SortKey::POLICY: return row.policy;
  }
  return std::nullopt;
}

std::optional<double> mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

const LeaderboardRow* Leaderboard::row(std::string_view method) const {
  for (const auto& r : rows) {
    if (r.method == method) return &r;
  }
  return nullptr;
}

std::vector<std::string> Leaderboard::order(SortKey key) const {
  std::vector<const LeaderboardRow*> sorted;
  for (const auto& r : rows) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [key](const LeaderboardRow* a, const LeaderboardRow* b) {
    const auto va = key_value(*a, key);
    const auto vb = key_value(*b, key);
    if (va.has_value() != vb.has_value()) return va.has_value();
    if (va && *va != *vb) return *va > *vb;
    return a->method < b->method;
  });
  std::vector<std::string> out;
  for (const auto* r : sorted) out.push_back(r->method);
  return out;
}

std::size_t Leaderboard::rank(std::string_view method, SortKey key) const {
  const auto ord = order(key);
  auto it = std::find(ord.begin(), ord.end(), method);
  if (it == ord.end()) throw LookupError(fmt::format("method '{}' not on the leaderboard", method));
  return static_cast<std::size_t>(it - ord.begin()) + 1;
}

Leaderboard build_leaderboard(const ScoreTable& table, const MetricPolicy& policy, SortKey sort_key) {
  if (table.methods().empty() || table.entry_count() == 0) throw ValidationError("score table is empty");
  Leaderboard lb;
  lb.sort_key = sort_key;

  const std::size_t M = table.methods().size();
  const std::size_t T = table.targets().size();
  // means[m][t][k]
  std::vector<std::vector<std::array<std::optional<double>, 2>>> means(M, std::vector<std::array<std::optional<double>, 2>>(T));
  std::array<std::vector<bool>, 2> has_any{std::vector<bool>(T, false), std::vector<bool>(T, false)};
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t t = 0; t < T; ++t) {
      for (MetricKind k : kAllMetrics) {
        const auto v = method_target_mean(table, table.methods()[m], table.targets()[t], k);
        means[m][t][static_cast<std::size_t>(k)] = v;
        if (v) has_any[static_cast<std::size_t>(k)][t] = true;
      }
    }
  }
  std::size_t populated_cells = 0;
  for (std::size_t t = 0; t < T; ++t) populated_cells += (has_any[0][t] ? 1 : 0) + (has_any[1][t] ? 1 : 0);

  std::vector<MetricAssignment> assigned(T);
  for (std::size_t t = 0; t < T; ++t) {
    const std::string& target = table.targets()[t];
    assigned[t] = policy.lookup(target);
    TargetRanking tr{target, assigned[t], {}};
    const auto k = static_cast<std::size_t>(assigned[t].metric);
    if (!has_any[k][t]) {
      lb.warnings.push_back(fmt::format("target '{}' is assigned {} but has no {} scores; excluded", target,
                                        to_string(assigned[t].metric), to_string(assigned[t].metric)));
    }
    for (std::size_t m = 0; m < M; ++m) {
      if (const auto v = means[m][t][k]) tr.ranking.push_back({table.methods()[m], *v});
    }
    std::sort(tr.ranking.begin(), tr.ranking.end(), [](const RankedEntry& a, const RankedEntry& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.method < b.method;
    });
    lb.per_target.push_back(std::move(tr));
  }

  for (std::size_t m = 0; m < M; ++m) {
    LeaderboardRow row;
    row.method = table.methods()[m];
    row.family = table.family(row.method);
    std::vector<double> dsc, nsd, pol;
    for (std::size_t t = 0; t < T; ++t) {
      if (const auto v = means[m][t][0]) dsc.push_back(*v);
      if (const auto v = means[m][t][1]) nsd.push_back(*v);
      if (const auto v = means[m][t][static_cast<std::size_t>(assigned[t].metric)]) pol.push_back(*v);
    }
    row.dsc_targets = dsc.size();
    row.nsd_targets = nsd.size();
    row.avg_dsc = mean_of(dsc);
    row.avg_nsd = mean_of(nsd);
    row.policy = mean_of(pol);
    if (row.avg_dsc && row.avg_nsd) row.overall = (*row.avg_dsc + *row.avg_nsd) / 2.0;
    row.coverage = populated_cells == 0 ? 0.0
                                        : static_cast<double>(dsc.size() + nsd.size()) /
                                              static_cast<double>(populated_cells);
    lb.rows.push_back(std::move(row));
  }

  const auto ord = lb.order(sort_key);
  std::vector<LeaderboardRow> sorted;
  for (const auto& id : ord) sorted.push_back(*lb.row(id));
  lb.rows = std::move(sorted);
  return lb;
}

RankChangeReport rank_changes(const Leaderboard& lb, SortKey key_a, SortKey key_b, std::size_t top_k) {
  const std::size_t M = lb.rows.size();
  if (top_k == 0 || top_k > M) {
    throw ArgumentError(fmt::format("top_k {} must be between 1 and the method count {}", top_k, M));
  }
  RankChangeReport report;
  report.key_a = key_a;
  report.key_b = key_b;
  report.top_k = top_k;
  const auto order_a = lb.order(key_a);
  const auto order_b = lb.order(key_b);
  for (std::size_t i = 0; i < M; ++i) {
    RankChange ch;
    ch.method = order_a[i];
    ch.rank_a = i + 1;
    ch.rank_b = static_cast<std::size_t>(std::find(order_b.begin(), order_b.end(), ch.method) - order_b.begin()) + 1;
    ch.delta = static_cast<long>(ch.rank_b) - static_cast<long>(ch.rank_a);
    if (ch.delta != 0) ++report.changed;
    report.changes.push_back(std::move(ch));
  }
  if (top_k >= 2) {
    report.top_k_reversal = std::equal(order_a.begin(), order_a.begin() + static_cast<long>(top_k),
                                       std::make_reverse_iterator(order_b.begin() + static_cast<long>(top_k)));
  }
  return report;
}

}  // namespace rankaudit
