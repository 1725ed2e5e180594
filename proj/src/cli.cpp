#include "rankaudit/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rankaudit/error.hpp"
#include "rankaudit/io.hpp"
#include "rankaudit/kde.hpp"
#include "rankaudit/parallel.hpp"
#include "rankaudit/seg_metrics.hpp"
#include "rankaudit/structured_text.hpp"
#include "rankaudit/svg.hpp"

namespace rankaudit {

namespace fs = std::filesystem;

namespace {

std::string num(double v) { return fmt::format("{:.10g}", v); }
std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

char delimiter_char(const std::string& d) {
  if (d == "tab" || d == "\\t") return '\t';
  if (d.size() != 1) throw ArgumentError(fmt::format("delimiter must be one character, got '{}'", d));
  return d.front();
}

std::vector<double> parse_tiers(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ArgumentError(fmt::format("invalid tier threshold '{}'", item));
    }
  }
  return out;
}

std::string sanitize(std::string_view id) {
  std::string out;
  for (char c : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    out += ok ? c : '_';
  }
  return out;
}

class Outputs {
 public:
  Outputs(fs::path dir, std::ostream& out) : dir_(std::move(dir)), out_(out) {}

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(dir_);
    const fs::path path = dir_ / name;
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw ValidationError(fmt::format("cannot write '{}'", path.string()));
    f << content;
    if (!f) throw ValidationError(fmt::format("failed writing '{}'", path.string()));
    out_ << "output=" << path.string() << '\n';
  }

 private:
  fs::path dir_;
  std::ostream& out_;
};

struct Context {
  RunConfig cfg;
  std::size_t workers = 1;
  char delim = ',';
  std::ostream& out;
  std::ostream& err;
};

TierThresholds thresholds_of(const RunConfig& cfg) {
  return {cfg.tiers[0], cfg.tiers[1], cfg.tiers[2]};
}

AxisOrder order_of(const RunConfig& cfg) {
  if (cfg.order == "family") return AxisOrder::family_then_mean();
  std::vector<std::string> ids;
  std::stringstream ss(cfg.order);
  std::string item;
  while (std::getline(ss, item, ',')) ids.push_back(item);
  return AxisOrder::given(std::move(ids));
}

ScoreTable load_scores(const Context& ctx) {
  ScoreSchema schema;
  schema.delimiter = ctx.delim;
  return load_score_table(ctx.cfg.scores, schema);
}

MetricPolicy policy_of(const RunConfig& cfg) {
  return cfg.policy.empty() ? default_policy() : load_policy(cfg.policy);
}

// ---------------------------------------------------------------- metrics --

void cmd_metrics(Context& ctx, Outputs& outputs) {
  const DelimitedFile manifest = read_delimited(ctx.cfg.pairs, ctx.delim);
  const std::size_t c_case = manifest.column("case");
  const std::size_t c_target = manifest.column("target");
  const std::size_t c_gt = manifest.column("gt");
  const std::size_t c_pred = manifest.column("pred");
  const std::size_t c_method = manifest.column("method");
  for (auto [col, name] : {std::pair{c_case, "case"}, {c_target, "target"}, {c_gt, "gt"}, {c_pred, "pred"}}) {
    if (col == std::string::npos) throw ParseError(1, fmt::format("manifest lacks column '{}'", name));
  }
  const fs::path base = ctx.cfg.pairs.parent_path();
  const bool have_policy = !ctx.cfg.policy.empty();
  const MetricPolicy policy = have_policy ? load_policy(ctx.cfg.policy) : MetricPolicy{};

  struct Result {
    double dsc = 0.0;
    SurfaceAgreement nsd;
    double tau = 0.0;
  };
  std::vector<Result> results(manifest.rows.size());
  parallel_for(manifest.rows.size(), ctx.workers, [&](std::size_t i) {
    const auto& row = manifest.rows[i];
    const VoxelMask gt = load_mask(base / row.fields[c_gt]);
    const VoxelMask pred = load_mask(base / row.fields[c_pred]);
    double tau = ctx.cfg.tau;
    if (have_policy) {
      const auto a = policy.lookup(row.fields[c_target]);
      if (a.tau_mm) tau = *a.tau_mm;
    }
    results[i] = {dsc(gt, pred), surface_agreement(gt, pred, Tolerance(tau)), tau};
  });

  const char d = ctx.delim;
  std::string csv = fmt::format("method{0}case{0}target{0}metric{0}score{0}tau_mm{0}degenerate\n", d);
  std::size_t degenerate = 0;
  for (std::size_t i = 0; i < manifest.rows.size(); ++i) {
    const auto& f = manifest.rows[i].fields;
    const std::string method = c_method == std::string::npos ? "prediction" : f[c_method];
    const auto& r = results[i];
    const std::string key = fmt::format("{1}{0}{2}{0}{3}", d, escape_field(method, d), escape_field(f[c_case], d),
                                        escape_field(f[c_target], d));
    csv += fmt::format("{1}{0}DSC{0}{2}{0}{0}false\n", d, key, num(r.dsc));
    csv += fmt::format("{1}{0}NSD{0}{2}{0}{3}{0}{4}\n", d, key, num(r.nsd.nsd), num(r.tau),
                       r.nsd.degenerate ? "true" : "false");
    if (r.nsd.degenerate) {
      ++degenerate;
      ctx.err << fmt::format("warning: {} / {} / {}: exactly one boundary is empty, NSD set to 0\n", method, f[c_case],
                             f[c_target]);
    }
  }
  outputs.write("metrics.csv", csv);
  ctx.out << "pairs=" << manifest.rows.size() << '\n' << "degenerate=" << degenerate << '\n';
}

// ----------------------------------------------------------- significance --

void do_significance(Context& ctx, Outputs& outputs, const ScoreTable& table) {
  SignificanceOptions opt;
  opt.alpha = ctx.cfg.alpha;
  opt.thresholds = thresholds_of(ctx.cfg);
  opt.order = order_of(ctx.cfg);
  opt.workers = ctx.workers;
  const MetricKind metric = parse_metric_kind(ctx.cfg.metric);
  const SignificanceMap map = significance_map(table, metric, opt);

  const char d = ctx.delim;
  std::string csv =
      fmt::format("row{0}column{0}p_raw{0}p_adj{0}tier{0}n_used{0}n_dropped_missing{0}n_dropped_zero\n", d);
  std::size_t significant = 0;
  for (std::size_t r = 0; r < map.size(); ++r) {
    for (std::size_t c = 0; c < map.size(); ++c) {
      if (r == c) continue;
      const auto& cell = map.at(r, c);
      if (cell.tier != Tier::NOT_SIGNIFICANT) ++significant;
      csv += fmt::format("{1}{0}{2}{0}{3}{0}{4}{0}{5}{0}{6}{0}{7}{0}{8}\n", d, escape_field(map.methods[r], d),
                         escape_field(map.methods[c], d), num(cell.p_raw), num(cell.p_adj), to_string(cell.tier),
                         cell.n_used, cell.n_dropped_missing, cell.n_dropped_zero);
    }
  }
  outputs.write("significance.csv", csv);
  outputs.write("significance.svg", render_significance_svg(map));
  ctx.out << "methods=" << map.size() << '\n'
          << "k_comparisons=" << map.k_comparisons << '\n'
          << "tests_run=" << map.tests_run << '\n'
          << "significant_cells=" << significant << '\n';
}

// ------------------------------------------------------------ leaderboard --

void do_leaderboard(Context& ctx, Outputs& outputs, const ScoreTable& table) {
  const MetricPolicy policy = policy_of(ctx.cfg);
  const SortKey sort = parse_sort_key(ctx.cfg.sort);
  const Leaderboard lb = build_leaderboard(table, policy, sort);
  for (const auto& w : lb.warnings) ctx.err << "warning: " << w << '\n';

  const char d = ctx.delim;
  std::string csv = fmt::format(
      "method{0}family{0}avg_dsc{0}avg_nsd{0}overall{0}coverage{0}rank_dsc{0}rank_nsd{0}rank_overall{0}policy_score{0}"
      "rank_policy",
      d);
  for (const auto& tr : lb.per_target) {
    csv += fmt::format("{0}{1}{0}{2}", d, escape_field(tr.target + ":" + std::string(to_string(tr.assignment.metric)), d),
                       escape_field(tr.target + ":rank", d));
  }
  csv += '\n';
  for (const auto& row : lb.rows) {
    csv += fmt::format("{1}{0}{2}{0}{3}{0}{4}{0}{5}{0}{6}{0}{7}{0}{8}{0}{9}{0}{10}{0}{11}", d,
                       escape_field(row.method, d), escape_field(row.family.value_or(""), d), num(row.avg_dsc),
                       num(row.avg_nsd), num(row.overall), num(row.coverage), lb.rank(row.method, SortKey::AVG_DSC),
                       lb.rank(row.method, SortKey::AVG_NSD), lb.rank(row.method, SortKey::OVERALL), num(row.policy),
                       lb.rank(row.method, SortKey::POLICY));
    for (const auto& tr : lb.per_target) {
      auto it = std::find_if(tr.ranking.begin(), tr.ranking.end(),
                             [&](const RankedEntry& e) { return e.method == row.method; });
      if (it == tr.ranking.end()) {
        csv += fmt::format("{0}{0}", d);
      } else {
        csv += fmt::format("{0}{1}{0}{2}", d, num(it->score), static_cast<std::size_t>(it - tr.ranking.begin()) + 1);
      }
    }
    csv += '\n';
  }
  outputs.write("leaderboard.csv", csv);

  const std::size_t top_k = std::min(ctx.cfg.top_k, lb.rows.size());
  std::string changes = fmt::format("key_a{0}key_b{0}method{0}rank_a{0}rank_b{0}delta\n", d);
  for (SortKey b : {SortKey::AVG_NSD, SortKey::OVERALL, SortKey::POLICY}) {
    if (b == sort) continue;
    const RankChangeReport rep = rank_changes(lb, sort, b, top_k);
    for (const auto& ch : rep.changes) {
      changes += fmt::format("{1}{0}{2}{0}{3}{0}{4}{0}{5}{0}{6}\n", d, to_string(sort), to_string(b),
                             escape_field(ch.method, d), ch.rank_a, ch.rank_b, ch.delta);
    }
    ctx.out << fmt::format("rank_changes key_a={} key_b={} changed={} top_k={} top_k_reversal={}\n", to_string(sort),
                           to_string(b), rep.changed, rep.top_k, rep.top_k_reversal ? "true" : "false");
  }
  outputs.write("rank_changes.csv", changes);
}

// --------------------------------------------------------------- fairness --

void do_fairness(Context& ctx, Outputs& outputs, const ScoreTable& table) {
  const DemographicTable meta = load_demographics(ctx.cfg.demographics, ctx.delim);
  AuditOptions opt;
  opt.dpd.mode = parse_dpd_mode(ctx.cfg.mode);
  opt.dpd.t = ctx.cfg.t;
  opt.dpd.flag_tau = ctx.cfg.flag_tau;
  if (!ctx.cfg.target.empty()) opt.dpd.selection.target = ctx.cfg.target;
  opt.min_n = ctx.cfg.min_n;
  opt.depth = ctx.cfg.depth;
  opt.include_unknown = ctx.cfg.include_unknown;
  opt.workers = ctx.workers;
  const MetricKind metric = parse_metric_kind(ctx.cfg.metric);
  const FairnessReport report = fairness_audit(table, meta, table.methods(), metric, opt);

  const char d = ctx.delim;
  std::string csv = fmt::format("method{0}attrs{0}group_a{0}group_b{0}n_a{0}n_b{0}mode{0}value{0}flagged\n", d);
  std::string worst = fmt::format(
      "equity_rank{0}method{0}attrs{0}group_a{0}group_b{0}n_a{0}n_b{0}stat_a{0}stat_b{0}mode{0}value{0}flagged\n", d);
  std::size_t flagged = 0;
  std::size_t rank = 0;
  for (const auto& mf : report.methods) {
    for (const auto& p : mf.pairs) {
      if (p.flagged) ++flagged;
      csv += fmt::format("{1}{0}{2}{0}{3}{0}{4}{0}{5}{0}{6}{0}{7}{0}{8}{0}{9}\n", d, escape_field(p.method, d),
                         escape_field(p.group_a.schema(), d), escape_field(p.group_a.label(), d),
                         escape_field(p.group_b.label(), d), p.n_a, p.n_b, to_string(p.mode), num(p.value),
                         p.flagged ? "true" : "false");
    }
    const DpdResult* w = mf.worst();
    if (w == nullptr) {
      ctx.err << fmt::format("warning: '{}' has no subgroup pair with n >= {}\n", mf.method, report.min_n);
      continue;
    }
    ++rank;
    worst += fmt::format("{1}{0}{2}{0}{3}{0}{4}{0}{5}{0}{6}{0}{7}{0}{8}{0}{9}{0}{10}{0}{11}{0}{12}\n", d, rank,
                         escape_field(w->method, d), escape_field(w->group_a.schema(), d),
                         escape_field(w->group_a.label(), d), escape_field(w->group_b.label(), d), w->n_a, w->n_b,
                         num(w->stat_a), num(w->stat_b), to_string(w->mode), num(w->value),
                         w->flagged ? "true" : "false");

    const CaseScores scores = case_scores(table, mf.method, metric, opt.dpd.selection);
    const auto left = member_scores(scores, w->group_a);
    const auto right = member_scores(scores, w->group_b);
    if (left.size() < 2 || right.size() < 2) {
      ctx.err << fmt::format("warning: '{}' worst pair has fewer than 2 scores per side; no violin\n", mf.method);
      continue;
    }
    outputs.write(fmt::format("violin_{}.svg", sanitize(mf.method)),
                  render_violin_svg({kde(left), w->group_a.label()}, {kde(right), w->group_b.label()}, *w));
  }
  outputs.write("fairness.csv", csv);
  outputs.write("fairness_worst.csv", worst);
  ctx.out << "subgroups=" << report.subgroups_enumerated << '\n' << "flagged_pairs=" << flagged << '\n';
}

// ---------------------------------------------------------- simulate-null --

void cmd_simulate_null(Context& ctx, Outputs* outputs) {
  NullSimulationOptions opt;
  opt.methods = ctx.cfg.methods;
  opt.cases = ctx.cfg.cases;
  opt.reps = ctx.cfg.reps;
  opt.seed = ctx.cfg.seed;
  opt.alpha = ctx.cfg.alpha;
  opt.workers = ctx.workers;
  const NullSimulationResult r = simulate_null(opt);
  if (outputs != nullptr) {
    std::string csv = fmt::format("rep{0}any_significant\n", ctx.delim);
    for (std::size_t i = 0; i < r.any_significant.size(); ++i) {
      csv += fmt::format("{1}{0}{2}\n", ctx.delim, i, r.any_significant[i] ? "true" : "false");
    }
    outputs->write("simulate_null.csv", csv);
  }
  ctx.out << "methods=" << opt.methods << '\n'
          << "cases=" << opt.cases << '\n'
          << "reps=" << r.reps << '\n'
          << "seed=" << opt.seed << '\n'
          << "alpha=" << num(opt.alpha) << '\n'
          << "reps_with_significant=" << r.reps_with_significant << '\n'
          << "fwer=" << num(r.fwer) << '\n';
}

// ------------------------------------------------------------------ parse --

struct Subcommands {
  CLI::App* metrics;
  CLI::App* significance;
  CLI::App* leaderboard;
  CLI::App* fairness;
  CLI::App* report;
  CLI::App* simulate;
};

Subcommands build_app(CLI::App& app, RunConfig& cfg, std::string& config_path) {
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.fallthrough(false);

  auto common = [&](CLI::App* s) {
    s->add_option("--config", config_path, "Structured-text run config; flags override it");
    s->add_option("--out", cfg.out, "Output directory");
    s->add_option("--delimiter", cfg.delimiter, "Field delimiter of input and output tables");
    s->add_option("--seed", cfg.seed, "Random seed");
  };
  auto scores = [&](CLI::App* s) { s->add_option("--scores", cfg.scores, "Score table (method,case,target,metric,score)"); };
  auto sig = [&](CLI::App* s) {
    s->add_option("--metric", cfg.metric, "DSC or NSD");
    s->add_option("--alpha", cfg.alpha, "Family-wise significance level");
    s->add_option("--tiers", cfg.tiers_text, "Comma-separated tier thresholds on adjusted p");
    s->add_option("--order", cfg.order, "'family' or a comma-separated explicit method order");
  };
  auto board = [&](CLI::App* s) {
    s->add_option("--policy", cfg.policy, "Metric policy file");
    s->add_option("--sort", cfg.sort, "AVG_DSC, AVG_NSD, OVERALL or POLICY");
    s->add_option("--top-k", cfg.top_k, "Top-k used for reversal detection");
  };
  auto fair = [&](CLI::App* s, bool required) {
    auto* o = s->add_option("--demographics", cfg.demographics, "Demographics table (case,<attributes>...)");
    if (required) o->required();
    if (s->get_option_no_throw("--metric") == nullptr) s->add_option("--metric", cfg.metric, "DSC or NSD");
    s->add_option("--mode", cfg.mode, "RATE or MEAN");
    s->add_option("--min-n", cfg.min_n, "Minimum scored cases per subgroup");
    s->add_option("--depth", cfg.depth, "Maximum attributes per subgroup");
    s->add_option("--t", cfg.t, "Success threshold (score > t)");
    s->add_option("--flag-tau", cfg.flag_tau, "Flag pairs with DPD > flag_tau");
    s->add_option("--target", cfg.target, "Score a single target instead of the per-case mean");
    s->add_flag("--include-unknown", cfg.include_unknown, "Enumerate 'unknown' categories too");
  };

  Subcommands subs{};
  subs.metrics = app.add_subcommand("metrics", "DSC and NSD for a manifest of mask pairs");
  common(subs.metrics);
  subs.metrics->add_option("--pairs", cfg.pairs, "Manifest (case,target,gt,pred[,method])");
  subs.metrics->add_option("--tau", cfg.tau, "NSD tolerance in mm when the policy gives none");
  subs.metrics->add_option("--policy", cfg.policy, "Metric policy file supplying per-target tolerances");

  subs.significance = app.add_subcommand("significance", "Pairwise one-sided Wilcoxon significance map");
  common(subs.significance);
  scores(subs.significance);
  sig(subs.significance);

  subs.leaderboard = app.add_subcommand("leaderboard", "Organ-aware leaderboard and rank changes");
  common(subs.leaderboard);
  scores(subs.leaderboard);
  board(subs.leaderboard);

  subs.fairness = app.add_subcommand("fairness", "Intersectional demographic parity audit");
  common(subs.fairness);
  scores(subs.fairness);
  fair(subs.fairness, true);

  subs.report = app.add_subcommand("report", "Significance, leaderboard and (with demographics) fairness");
  common(subs.report);
  scores(subs.report);
  sig(subs.report);
  board(subs.report);
  fair(subs.report, false);

  subs.simulate = app.add_subcommand("simulate-null", "Family-wise error rate under an exchangeable null");
  common(subs.simulate);
  subs.simulate->add_option("--methods", cfg.methods, "Number of methods");
  subs.simulate->add_option("--cases", cfg.cases, "Number of cases");
  subs.simulate->add_option("--reps", cfg.reps, "Repetitions");
  subs.simulate->add_option("--alpha", cfg.alpha, "Family-wise significance level");
  return subs;
}

// Turns config entries into flags placed ahead of the command-line flags so
// that explicit flags win under TakeLast.
std::vector<std::string> config_args(const StDocument& doc, CLI::App& app, CLI::App& sub) {
  std::vector<std::string> out;
  for (const auto& e : doc.entries) {
    std::string name = "--" + e.key;
    std::replace(name.begin(), name.end(), '_', '-');
    if (name == "--config") throw ConfigError(fmt::format("line {}: config files cannot nest", e.line));
    CLI::Option* opt = sub.get_option_no_throw(name);
    if (opt == nullptr) {
      bool known = false;
      for (const CLI::App* other : app.get_subcommands({})) known = known || other->get_option_no_throw(name) != nullptr;
      if (!known) throw ConfigError(fmt::format("line {}: unknown config key '{}'", e.line, e.key));
      continue;
    }
    switch (e.value.kind) {
      case StValue::Kind::Bool:
        if (e.value.boolean) out.push_back(name);
        break;
      case StValue::Kind::String:
        out.push_back(name);
        out.push_back(e.value.text);
        break;
      case StValue::Kind::Number:
        out.push_back(name);
        out.push_back(fmt::format("{}", e.value.number));
        break;
      case StValue::Kind::Array: {
        std::string joined;
        for (const auto& item : e.value.items) {
          if (!joined.empty()) joined += ',';
          joined += item.kind == StValue::Kind::String ? item.text : fmt::format("{}", item.number);
        }
        out.push_back(name);
        out.push_back(joined);
        break;
      }
      case StValue::Kind::Table:
        throw ConfigError(fmt::format("line {}: '{}' cannot be a table", e.line, e.key));
    }
  }
  return out;
}

std::optional<std::string> find_config(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

}  // namespace

void validate(RunConfig& cfg) {
  auto unit = [](double v, const char* name) {
    if (!(v > 0.0 && v < 1.0)) throw ArgumentError(fmt::format("{} must lie in (0, 1), got {}", name, v));
  };
  unit(cfg.alpha, "alpha");
  unit(cfg.t, "t");
  unit(cfg.flag_tau, "flag_tau");
  if (!cfg.tiers_text.empty()) cfg.tiers = parse_tiers(cfg.tiers_text);
  if (cfg.tiers.size() != 3) throw ArgumentError("exactly three tier thresholds are required");
  for (double v : cfg.tiers) unit(v, "tier threshold");
  if (!(cfg.tiers[0] < cfg.tiers[1] && cfg.tiers[1] < cfg.tiers[2])) {
    throw ArgumentError("tier thresholds must be strictly increasing");
  }
  Tolerance{cfg.tau};
  if (cfg.depth < 1) throw ArgumentError("depth must be at least 1");
  if (cfg.top_k < 1) throw ArgumentError("top_k must be at least 1");
  parse_metric_kind(cfg.metric);
  parse_dpd_mode(cfg.mode);
  parse_sort_key(cfg.sort);
  delimiter_char(cfg.delimiter);
  for (fs::path* p : {&cfg.scores, &cfg.demographics, &cfg.pairs, &cfg.policy, &cfg.out}) {
    if (!p->empty()) *p = fs::absolute(*p).lexically_normal();
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string config_path;
  CLI::App app{"Leaderboard audit toolkit: significance maps, organ-aware rankings, fairness"};
  app.name("rankaudit");
  Subcommands subs{};
  try {
    subs = build_app(app, cfg, config_path);
    std::vector<std::string> full = args;
    if (const auto path = find_config(args)) {
      auto sub_it = std::find_if(args.begin(), args.end(), [](const std::string& a) { return !a.empty() && a[0] != '-'; });
      CLI::App* sub = sub_it == args.end() ? nullptr : app.get_subcommand_no_throw(*sub_it);
      if (sub == nullptr) throw CLI::RequiredError("a subcommand");
      const auto extra = config_args(load_structured_text(*path), app, *sub);
      const auto pos = static_cast<std::ptrdiff_t>(sub_it - args.begin()) + 1;
      full.insert(full.begin() + pos, extra.begin(), extra.end());
    }
    std::vector<std::string> reversed(full.rbegin(), full.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    err << app.help();
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    validate(cfg);
    Context ctx{cfg, worker_count(), delimiter_char(cfg.delimiter), out, err};
    Outputs outputs(cfg.out, out);
    auto need = [](const fs::path& p, const char* flag) {
      if (p.empty()) throw ArgumentError(fmt::format("{} is required", flag));
    };
    if (subs.metrics->parsed()) {
      need(cfg.pairs, "--pairs");
      cmd_metrics(ctx, outputs);
    } else if (subs.significance->parsed()) {
      need(cfg.scores, "--scores");
      do_significance(ctx, outputs, load_scores(ctx));
    } else if (subs.leaderboard->parsed()) {
      need(cfg.scores, "--scores");
      do_leaderboard(ctx, outputs, load_scores(ctx));
    } else if (subs.fairness->parsed()) {
      need(cfg.scores, "--scores");
      do_fairness(ctx, outputs, load_scores(ctx));
    } else if (subs.report->parsed()) {
      need(cfg.scores, "--scores");
      const ScoreTable table = load_scores(ctx);
      do_significance(ctx, outputs, table);
      do_leaderboard(ctx, outputs, table);
      if (!cfg.demographics.empty()) do_fairness(ctx, outputs, table);
    } else if (subs.simulate->parsed()) {
      const bool explicit_out = subs.simulate->get_option("--out")->count() > 0;
      cmd_simulate_null(ctx, explicit_out ? &outputs : nullptr);
    }
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace rankaudit
