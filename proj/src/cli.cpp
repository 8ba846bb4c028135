#include "scalelaw/cli.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "scalelaw/bootstrap.hpp"
#include "scalelaw/diagnose.hpp"
#include "scalelaw/error.hpp"
#include "scalelaw/plot.hpp"
#include "scalelaw/powerlaw.hpp"
#include "scalelaw/predict.hpp"
#include "scalelaw/records.hpp"
#include "scalelaw/report.hpp"
#include "scalelaw/scalecalc.hpp"
#include "scalelaw/synth.hpp"

namespace scalelaw::cli {

namespace {

using nlohmann::json;

constexpr std::int64_t kNoUpperDepth = std::numeric_limits<std::int64_t>::max();

struct DataOptions {
  std::string input;
  std::optional<std::string> input_format;
  std::optional<std::string> task;
  std::optional<std::string> family;
  std::optional<std::string> metric;
};

struct BootstrapOptions {
  std::size_t replicates = 1000;
  double lo = 2.5;
  double hi = 97.5;
  std::string mode = "hierarchical";
  std::optional<std::uint64_t> seed;
  std::size_t max_redraws = 100;
  int threads = 0;
};

struct TargetOptions {
  std::optional<std::int64_t> layers;
  std::optional<std::int64_t> hidden;
  std::optional<std::int64_t> params;
};

void add_data_options(CLI::App* cmd, DataOptions& d, bool with_family = true) {
  cmd->add_option("--input", d.input, "Run records (.jsonl or .csv)")->required();
  cmd->add_option("--input-format", d.input_format, "jsonl or csv (default: from extension)");
  cmd->add_option("--task", d.task, "Task identifier");
  if (with_family) cmd->add_option("--family", d.family, "Method family identifier");
  cmd->add_option("--metric", d.metric, "Metric name");
}

void add_bootstrap_options(CLI::App* cmd, BootstrapOptions& b, bool seed_required) {
  cmd->add_option("--B", b.replicates, "Bootstrap replicates")->capture_default_str();
  cmd->add_option("--lo", b.lo, "Lower percentile")->capture_default_str();
  cmd->add_option("--hi", b.hi, "Upper percentile")->capture_default_str();
  cmd->add_option("--mode", b.mode, "hierarchical or naive")->capture_default_str();
  auto* seed = cmd->add_option("--seed", b.seed, "RNG seed");
  if (seed_required) seed->required();
  cmd->add_option("--max-redraws", b.max_redraws, "Consecutive degenerate draws before aborting")
      ->capture_default_str();
  cmd->add_option("--threads", b.threads, "OpenMP threads (0 = default, 1 = serial)");
}

void add_target_options(CLI::App* cmd, TargetOptions& t) {
  cmd->add_option("--target-layers", t.layers, "Target depth");
  cmd->add_option("--target-hidden", t.hidden, "Target width");
  cmd->add_option("--target-params", t.params, "Target parameter count");
}

BootstrapConfig to_config(const BootstrapOptions& b) {
  BootstrapConfig cfg;
  cfg.replicates = b.replicates;
  cfg.lo_pct = b.lo;
  cfg.hi_pct = b.hi;
  cfg.mode = parse_bootstrap_mode(b.mode);
  cfg.rng_seed = b.seed.value_or(0);
  cfg.max_redraws = b.max_redraws;
  cfg.threads = b.threads;
  validate(cfg);
  return cfg;
}

ScaleSpec to_target(const TargetOptions& t) {
  if (t.params) {
    if (t.layers || t.hidden) throw UsageError("give either --target-params or --target-layers/--target-hidden");
    return ScaleSpec::from_params(*t.params);
  }
  if (t.layers && t.hidden) return ScaleSpec::from_shape(*t.layers, *t.hidden);
  throw UsageError("a target needs --target-params N or --target-layers L --target-hidden H");
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json echo(const DataOptions& d) {
  return json{{"input", d.input}, {"input_format", opt(d.input_format)}, {"task", opt(d.task)},
              {"family", opt(d.family)}, {"metric", opt(d.metric)}};
}

json echo(const BootstrapOptions& b) {
  return json{{"B", b.replicates}, {"lo", b.lo},     {"hi", b.hi},
              {"mode", b.mode},    {"seed", opt(b.seed)}, {"max_redraws", b.max_redraws}};
}

json echo(const TargetOptions& t) {
  return json{{"target_layers", opt(t.layers)}, {"target_hidden", opt(t.hidden)}, {"target_params", opt(t.params)}};
}

json summary(const RunSet& s) {
  return json{{"task", s.key().task},         {"family", s.key().family},
              {"metric", s.key().metric},     {"direction", to_token(s.direction())},
              {"n_records", s.size()},        {"n_scales", s.num_scales()}};
}

std::vector<RunRecord> load(const DataOptions& d, std::ostream& err) {
  RecordFormat fmt = format_for_path(d.input);
  if (d.input_format) {
    if (*d.input_format == "jsonl") {
      fmt = RecordFormat::jsonl;
    } else if (*d.input_format == "csv") {
      fmt = RecordFormat::csv;
    } else {
      throw UsageError("unknown input format '" + *d.input_format + "' (expected jsonl or csv)");
    }
  }
  auto result = ingest(d.input, fmt);
  for (const auto& w : result.warnings) err << "warning: " << w << '\n';
  return std::move(result.records);
}

std::string describe(const GroupKey& k) { return "(" + k.task + ", " + k.family + ", " + k.metric + ")"; }

RunSet pick(const std::vector<RunRecord>& records, const std::optional<std::string>& task,
            const std::optional<std::string>& family, const std::optional<std::string>& metric) {
  const auto groups = group(records);
  std::vector<const RunSet*> hits;
  for (const auto& [key, set] : groups) {
    if ((task && key.task != *task) || (family && key.family != *family) || (metric && key.metric != *metric)) {
      continue;
    }
    hits.push_back(&set);
  }
  if (hits.empty()) {
    throw DataError("no records match task=" + task.value_or("*") + " family=" + family.value_or("*") +
                    " metric=" + metric.value_or("*"));
  }
  if (hits.size() > 1) {
    std::string list;
    for (const auto* h : hits) list += " " + describe(h->key());
    throw UsageError("selection is ambiguous; narrow it with --task/--family/--metric. Candidates:" + list);
  }
  return *hits.front();
}

RunSet pick(const std::vector<RunRecord>& records, const DataOptions& d) {
  return pick(records, d.task, d.family, d.metric);
}

std::vector<double> band_grid(const RunSet& set, std::size_t n, double extent) {
  const auto params = set.scale_params();
  if (params.empty()) throw DataError("empty run set");
  const double lo = static_cast<double>(params.front());
  const double hi = std::max(static_cast<double>(params.back()), extent);
  return log_grid(lo, hi, n);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path);
  f << content;
  if (!f) throw DataError("failed writing " + path);
}

void emit(const Report& report, const std::string& format, std::ostream& out) {
  if (format == "table") {
    out << "command  " << report.command << '\n' << render_table(report.results);
  } else {
    out << serialize(report);
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scaling-law fitting, bootstrap uncertainty, extrapolation and diagnostics", "scalelaw"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string format = "json";
  app.add_option("--format", format, "json or table")->check(CLI::IsMember({"json", "table"}));

  // fit
  DataOptions fit_data;
  std::optional<std::int64_t> fit_min_depth;
  std::string fit_space = "log";
  auto* fit_cmd = app.add_subcommand("fit", "Least-squares power-law fit in log-log space");
  add_data_options(fit_cmd, fit_data);
  fit_cmd->add_option("--min-depth", fit_min_depth, "Use only models with at least this many layers");
  fit_cmd->add_option("--r2-space", fit_space, "log or linear")->check(CLI::IsMember({"log", "linear"}));

  // bootstrap
  DataOptions bs_data;
  BootstrapOptions bs_opts;
  std::optional<std::int64_t> bs_min_depth;
  std::size_t bs_grid_points = 20;
  std::optional<double> bs_grid_max;
  auto* bs_cmd = app.add_subcommand("bootstrap", "Slope and point-wise confidence bands");
  add_data_options(bs_cmd, bs_data);
  add_bootstrap_options(bs_cmd, bs_opts, true);
  bs_cmd->add_option("--min-depth", bs_min_depth, "Use only models with at least this many layers");
  bs_cmd->add_option("--grid-points", bs_grid_points, "Band grid size")->capture_default_str();
  bs_cmd->add_option("--grid-max", bs_grid_max, "Extend the band grid up to this parameter count");

  // predict
  DataOptions pr_data;
  BootstrapOptions pr_boot;
  TargetOptions pr_target;
  std::optional<double> pr_actual;
  std::optional<std::int64_t> pr_min_depth;
  auto* pr_cmd = app.add_subcommand("predict", "Extrapolate the fitted law to a target scale");
  add_data_options(pr_cmd, pr_data);
  add_bootstrap_options(pr_cmd, pr_boot, true);
  add_target_options(pr_cmd, pr_target);
  pr_cmd->add_option("--actual", pr_actual, "Observed value at the target, for RE");
  pr_cmd->add_option("--min-depth", pr_min_depth, "Use only models with at least this many layers");

  // holdout
  DataOptions ho_data;
  std::string ho_train;
  std::string ho_test;
  auto* ho_cmd = app.add_subcommand("holdout", "Fit on some depths, score MRE on others");
  add_data_options(ho_cmd, ho_data);
  ho_cmd->add_option("--train-layers", ho_train, "Inclusive range A-B")->required();
  ho_cmd->add_option("--test-layers", ho_test, "Inclusive range C-D")->required();

  // select
  DataOptions se_data;
  std::string se_family_a;
  std::string se_family_b;
  double se_threshold = kDefaultR2Threshold;
  TargetOptions se_target;
  BootstrapOptions se_boot;
  std::optional<double> se_actual_a;
  std::optional<double> se_actual_b;
  auto* se_cmd = app.add_subcommand("select", "Compare two method families at a larger scale");
  add_data_options(se_cmd, se_data, false);
  se_cmd->add_option("--family-a", se_family_a, "First family")->required();
  se_cmd->add_option("--family-b", se_family_b, "Second family")->required();
  se_cmd->add_option("--r2-threshold", se_threshold, "R^2 gate")->capture_default_str();
  add_target_options(se_cmd, se_target);
  add_bootstrap_options(se_cmd, se_boot, true);
  se_cmd->add_option("--actual-a", se_actual_a, "Observed value of family A at the target");
  se_cmd->add_option("--actual-b", se_actual_b, "Observed value of family B at the target");

  // flops
  std::optional<std::int64_t> fl_params;
  std::optional<std::int64_t> fl_tokens;
  std::optional<std::string> fl_input;
  std::optional<std::int64_t> fl_ar;
  std::optional<std::string> fl_small;
  std::optional<std::int64_t> fl_large_layers;
  std::optional<std::int64_t> fl_large_hidden;
  auto* fl_cmd = app.add_subcommand("flops", "Training compute C = 6ND and savings ratios");
  fl_cmd->add_option("--params", fl_params, "Parameter count N");
  fl_cmd->add_option("--tokens", fl_tokens, "Tokens observed D");
  fl_cmd->add_option("--input", fl_input, "Run records with token counts");
  fl_cmd->add_option("--aspect-ratio", fl_ar, "Aspect ratio H/L of the small models");
  fl_cmd->add_option("--small-layers", fl_small, "Depth range of the small models, A-B");
  fl_cmd->add_option("--large-layers", fl_large_layers, "Depth of the large model");
  fl_cmd->add_option("--large-hidden", fl_large_hidden, "Width of the large model");

  // diagnose
  auto* dg_cmd = app.add_subcommand("diagnose", "Convergence diagnostics");
  dg_cmd->require_subcommand(1);
  std::string es_curve;
  std::vector<std::int64_t> es_patience;
  double es_min_decrease = 0.0;
  auto* es_cmd = dg_cmd->add_subcommand("earlystop", "Replay early-stopping policies over a loss curve");
  es_cmd->add_option("--curve", es_curve, "CSV with header step,eval_loss")->required();
  es_cmd->add_option("--patience", es_patience, "Patience in evaluations (repeatable)")->required();
  es_cmd->add_option("--min-decrease", es_min_decrease, "Required improvement")->capture_default_str();

  DataOptions fo_data;
  BootstrapOptions fo_boot;
  std::int64_t fo_layers = 0;
  std::optional<std::int64_t> fo_hidden;
  double fo_observed = 0.0;
  auto* fo_cmd = dg_cmd->add_subcommand("fit-outlier", "Check a held-out scale's loss against the band");
  add_data_options(fo_cmd, fo_data);
  add_bootstrap_options(fo_cmd, fo_boot, true);
  fo_cmd->add_option("--holdout-layers", fo_layers, "Depth of the suspect model")->required();
  fo_cmd->add_option("--holdout-hidden", fo_hidden, "Width, when no record exists at that depth");
  fo_cmd->add_option("--observed", fo_observed, "Observed converged loss")->required();

  // synth
  double sy_alpha = 0.08;
  double sy_log_c = 3.0;
  std::int64_t sy_ar = 32;
  std::string sy_layers = "1-8";
  std::int64_t sy_seeds = 5;
  double sy_sigma_pre = 0.0;
  double sy_sigma_fin = 0.01;
  std::optional<std::uint64_t> sy_seed;
  std::string sy_direction = "max";
  std::string sy_noise = "normal";
  std::string sy_task = "synthetic";
  std::string sy_family = "synth";
  std::string sy_metric = "score";
  std::string sy_out;
  std::optional<std::string> sy_truth;
  auto* sy_cmd = app.add_subcommand("synth", "Generate records from a known power law");
  sy_cmd->add_option("--alpha", sy_alpha, "True slope")->capture_default_str();
  sy_cmd->add_option("--log-c", sy_log_c, "True log-space intercept")->capture_default_str();
  sy_cmd->add_option("--aspect-ratio", sy_ar, "Width per layer")->capture_default_str();
  sy_cmd->add_option("--layers", sy_layers, "Depth range A-B")->capture_default_str();
  sy_cmd->add_option("--seeds", sy_seeds, "Runs per scale")->capture_default_str();
  sy_cmd->add_option("--sigma-pre", sy_sigma_pre, "Per-scale log noise")->capture_default_str();
  sy_cmd->add_option("--sigma-fin", sy_sigma_fin, "Per-run log noise")->capture_default_str();
  sy_cmd->add_option("--seed", sy_seed, "RNG seed")->required();
  sy_cmd->add_option("--direction", sy_direction, "max or min")->capture_default_str();
  sy_cmd->add_option("--noise", sy_noise, "normal or uniform")->capture_default_str();
  sy_cmd->add_option("--task", sy_task)->capture_default_str();
  sy_cmd->add_option("--family", sy_family)->capture_default_str();
  sy_cmd->add_option("--metric", sy_metric)->capture_default_str();
  sy_cmd->add_option("--out", sy_out, "Output JSONL path")->required();
  sy_cmd->add_option("--truth", sy_truth, "Ground-truth JSON path (default: <out>.truth.json)");

  // plot
  DataOptions pl_data;
  BootstrapOptions pl_boot;
  std::string pl_out;
  bool pl_band = false;
  std::size_t pl_grid_points = 20;
  std::optional<std::int64_t> pl_target_params;
  std::optional<std::string> pl_holdout;
  std::string pl_title;
  auto* pl_cmd = app.add_subcommand("plot", "Log-log SVG of points, fitted line and confidence sleeve");
  add_data_options(pl_cmd, pl_data);
  add_bootstrap_options(pl_cmd, pl_boot, false);
  pl_cmd->add_option("--out", pl_out, "SVG output path")->required();
  pl_cmd->add_flag("--band", pl_band, "Draw the bootstrap sleeve (needs --seed)");
  pl_cmd->add_option("--grid-points", pl_grid_points, "Sleeve grid size")->capture_default_str();
  pl_cmd->add_option("--target-params", pl_target_params, "Extend line and sleeve to this size");
  pl_cmd->add_option("--holdout-layers", pl_holdout, "Depth range excluded from the fit, drawn as held out");
  pl_cmd->add_option("--title", pl_title, "Plot title");

  std::vector<std::string> argv_store{"scalelaw"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitUsage;
  }

  try {
    Report report;
    if (*fit_cmd) {
      const auto set = pick(load(fit_data, err), fit_data);
      const auto space = parse_residual_space(fit_space);
      const auto fit = fit_min_depth ? fit_filtered(set, *fit_min_depth, space) : fit_runset(set, space);
      report.command = "fit";
      report.inputs = echo(fit_data);
      report.inputs["min_depth"] = opt(fit_min_depth);
      report.inputs["r2_space"] = fit_space;
      report.results = json{{"fit", fit}, {"runset", summary(set)}};
    } else if (*bs_cmd) {
      auto set = pick(load(bs_data, err), bs_data);
      if (bs_min_depth) set = filter_layers(set, *bs_min_depth, kNoUpperDepth);
      const auto cfg = to_config(bs_opts);
      const auto grid = band_grid(set, bs_grid_points, bs_grid_max.value_or(0.0));
      const auto fit = fit_runset(set);
      const auto band = bootstrap(set, cfg, grid);
      report.command = "bootstrap";
      report.inputs = echo(bs_data);
      report.inputs.update(echo(bs_opts));
      report.inputs["min_depth"] = opt(bs_min_depth);
      report.inputs["grid_points"] = bs_grid_points;
      report.inputs["grid_max"] = opt(bs_grid_max);
      report.results = json{{"fit", fit}, {"band", band}, {"runset", summary(set)}};
    } else if (*pr_cmd) {
      auto set = pick(load(pr_data, err), pr_data);
      if (pr_min_depth) set = filter_layers(set, *pr_min_depth, kNoUpperDepth);
      const auto target = to_target(pr_target);
      const auto rep = extrapolate(set, target, to_config(pr_boot), pr_actual);
      report.command = "predict";
      report.inputs = echo(pr_data);
      report.inputs.update(echo(pr_boot));
      report.inputs.update(echo(pr_target));
      report.inputs["actual"] = opt(pr_actual);
      report.inputs["min_depth"] = opt(pr_min_depth);
      report.results = json{{"prediction", rep}, {"target", target}, {"runset", summary(set)}};
    } else if (*ho_cmd) {
      const auto set = pick(load(ho_data, err), ho_data);
      const auto rep = holdout_eval(set, parse_layer_range(ho_train), parse_layer_range(ho_test));
      report.command = "holdout";
      report.inputs = echo(ho_data);
      report.inputs["train_layers"] = ho_train;
      report.inputs["test_layers"] = ho_test;
      report.results = json{{"prediction", rep}, {"runset", summary(set)}};
    } else if (*se_cmd) {
      const auto records = load(se_data, err);
      const auto a = pick(records, se_data.task, se_family_a, se_data.metric);
      const auto b = pick(records, se_data.task, se_family_b, se_data.metric);
      const auto sel = select_model(a, b, to_target(se_target), se_threshold, to_config(se_boot), se_actual_a,
                                    se_actual_b);
      report.command = "select";
      report.inputs = echo(se_data);
      report.inputs.erase("family");
      report.inputs.update(echo(se_boot));
      report.inputs.update(echo(se_target));
      report.inputs["family_a"] = se_family_a;
      report.inputs["family_b"] = se_family_b;
      report.inputs["r2_threshold"] = se_threshold;
      report.inputs["actual_a"] = opt(se_actual_a);
      report.inputs["actual_b"] = opt(se_actual_b);
      report.results = json{{"selection", sel}};
    } else if (*fl_cmd) {
      report.command = "flops";
      report.inputs = json{{"params", opt(fl_params)},       {"tokens", opt(fl_tokens)},
                           {"input", opt(fl_input)},         {"aspect_ratio", opt(fl_ar)},
                           {"small_layers", opt(fl_small)},  {"large_layers", opt(fl_large_layers)},
                           {"large_hidden", opt(fl_large_hidden)}};
      const json note = "evaluation FLOPs spent on early stopping are not counted";
      if (fl_small || fl_ar || fl_large_layers || fl_large_hidden) {
        if (!(fl_small && fl_ar && fl_large_layers && fl_large_hidden)) {
          throw UsageError("savings mode needs --aspect-ratio, --small-layers, --large-layers and --large-hidden");
        }
        const auto range = parse_layer_range(*fl_small);
        std::vector<SizedModel> small;
        std::int64_t total = 0;
        for (const auto& s : aspect_ratio_family(*fl_ar, range.lo, range.hi)) {
          small.push_back({s, std::nullopt});
          total += s.params();
        }
        const SizedModel large{ScaleSpec::from_shape(*fl_large_layers, *fl_large_hidden), std::nullopt};
        report.results = json{{"small_total_params", total},
                              {"large_params", large.scale.params()},
                              {"savings_ratio", savings_ratio(small, large, TokenAssumption::equal_tokens)},
                              {"assumption", "equal_tokens"},
                              {"note", note}};
      } else if (fl_input) {
        if (fl_params || fl_tokens) throw UsageError("give either --params/--tokens or --input");
        DataOptions d;
        d.input = *fl_input;
        const auto records = load(d, err);
        json rows = json::array();
        FlopCount total = 0;
        std::size_t skipped = 0;
        for (const auto& r : records) {
          if (!r.tokens) {
            ++skipped;
            continue;
          }
          const auto c = estimate_compute(r.scale.params(), *r.tokens);
          total += c.flops;
          rows.push_back(json{{"task", r.task},
                              {"family", r.family},
                              {"pretrain_seed", r.pretrain_seed},
                              {"finetune_seed", r.finetune_seed},
                              {"compute", c}});
        }
        report.results = json{{"records", rows},
                               {"total_flops", flops_json(total)},
                               {"records_without_tokens", skipped},
                               {"note", note}};
      } else {
        if (!fl_params || !fl_tokens) throw UsageError("flops needs --params N --tokens D, or --input FILE");
        report.results = json{{"compute", estimate_compute(*fl_params, *fl_tokens)}, {"note", note}};
      }
    } else if (*dg_cmd) {
      if (*es_cmd) {
        const auto curve = read_loss_curve(es_curve);
        std::vector<EarlyStopPolicy> policies;
        for (auto p : es_patience) policies.push_back({p, es_min_decrease});
        report.command = "diagnose earlystop";
        report.inputs = json{{"curve", es_curve}, {"patience", es_patience}, {"min_decrease", es_min_decrease}};
        report.results = json{{"policies", compare_policies(curve, policies)}, {"curve_points", curve.size()}};
      } else {
        const auto set = pick(load(fo_data, err), fo_data);
        std::optional<ScaleSpec> held_out;
        for (const auto& r : set.records()) {
          if (r.scale.layers() == fo_layers) held_out = r.scale;
        }
        if (!held_out) {
          if (!fo_hidden) {
            throw UsageError("no records at depth " + std::to_string(fo_layers) + "; pass --holdout-hidden");
          }
          held_out = ScaleSpec::from_shape(fo_layers, *fo_hidden);
        }
        const auto verdict = flag_undertrained(exclude_layers(set, fo_layers), *held_out, fo_observed,
                                               to_config(fo_boot));
        report.command = "diagnose fit-outlier";
        report.inputs = echo(fo_data);
        report.inputs.update(echo(fo_boot));
        report.inputs["holdout_layers"] = fo_layers;
        report.inputs["holdout_hidden"] = opt(fo_hidden);
        report.inputs["observed"] = fo_observed;
        report.results = json{{"verdict", verdict}, {"runset", summary(set)}};
      }
    } else if (*sy_cmd) {
      const auto range = parse_layer_range(sy_layers);
      SynthSpec spec;
      spec.true_alpha = sy_alpha;
      spec.true_log_c = sy_log_c;
      spec.scales = aspect_ratio_family(sy_ar, range.lo, range.hi);
      spec.seeds_per_scale = sy_seeds;
      spec.sigma_pre = sy_sigma_pre;
      spec.sigma_fin = sy_sigma_fin;
      spec.rng_seed = *sy_seed;
      spec.direction = parse_direction(sy_direction);
      spec.noise = parse_noise_kind(sy_noise);
      spec.task = sy_task;
      spec.family = sy_family;
      spec.metric = sy_metric;
      const auto gen = generate(spec);
      std::ostringstream jsonl;
      emit_jsonl(jsonl, gen.runs.records());
      const std::string truth_path = sy_truth.value_or(sy_out + ".truth.json");
      json scales = json::array();
      for (std::size_t j = 0; j < spec.scales.size(); ++j) {
        json s = spec.scales[j];
        s["offset"] = gen.scale_offsets[j];
        scales.push_back(s);
      }
      const json truth{{"true_alpha", gen.true_alpha},   {"true_log_c", gen.true_log_c},
                       {"sigma_pre", spec.sigma_pre},     {"sigma_fin", spec.sigma_fin},
                       {"noise", to_token(spec.noise)},  {"seeds_per_scale", spec.seeds_per_scale},
                       {"rng_seed", spec.rng_seed},       {"scales", scales}};
      write_file(sy_out, jsonl.str());
      write_file(truth_path, truth.dump(2) + "\n");
      report.command = "synth";
      report.inputs = json{{"alpha", sy_alpha},         {"log_c", sy_log_c},       {"aspect_ratio", sy_ar},
                           {"layers", sy_layers},       {"seeds", sy_seeds},       {"sigma_pre", sy_sigma_pre},
                           {"sigma_fin", sy_sigma_fin}, {"seed", *sy_seed},        {"direction", sy_direction},
                           {"noise", sy_noise},         {"task", sy_task},         {"family", sy_family},
                           {"metric", sy_metric},       {"out", sy_out},           {"truth", truth_path}};
      report.results = json{{"records", gen.runs.size()}, {"out", sy_out}, {"truth_path", truth_path},
                            {"truth", truth}};
    } else if (*pl_cmd) {
      if (pl_band && !pl_boot.seed) throw UsageError("--band draws bootstrap replicates and requires --seed");
      const auto set = pick(load(pl_data, err), pl_data);
      RunSet fit_set = set;
      std::vector<Point> held_out;
      if (pl_holdout) {
        const auto range = parse_layer_range(*pl_holdout);
        std::vector<RunRecord> kept;
        for (const auto& r : set.records()) {
          if (!r.scale.layers()) throw DataError("held-out markers need layer information");
          const auto l = *r.scale.layers();
          if (l >= range.lo && l <= range.hi) {
            held_out.push_back({static_cast<double>(r.scale.params()), r.value});
          } else {
            kept.push_back(r);
          }
        }
        fit_set = RunSet(std::move(kept));
      }
      PlotSeries series;
      series.label = set.key().family + " / " + set.key().task;
      series.points = points_of(fit_set);
      for (const auto& r : fit_set.records()) series.pretrain_seeds.push_back(r.pretrain_seed);
      series.fit = fit_runset(fit_set);
      series.held_out = held_out;
      double extent = pl_target_params ? static_cast<double>(*pl_target_params) : 0.0;
      for (const auto& p : held_out) extent = std::max(extent, p.x);
      if (pl_band) {
        const auto grid = band_grid(fit_set, pl_grid_points, extent);
        series.band = bootstrap(fit_set, to_config(pl_boot), grid).point_band;
      }
      PlotSpec spec;
      spec.series.push_back(series);
      spec.title = pl_title;
      spec.y_label = set.key().metric;
      const auto svg = render_plot(spec);
      write_file(pl_out, svg);
      report.command = "plot";
      report.inputs = echo(pl_data);
      report.inputs.update(echo(pl_boot));
      report.inputs["out"] = pl_out;
      report.inputs["band"] = pl_band;
      report.inputs["grid_points"] = pl_grid_points;
      report.inputs["target_params"] = opt(pl_target_params);
      report.inputs["holdout_layers"] = opt(pl_holdout);
      report.inputs["title"] = pl_title;
      report.results = json{{"out", pl_out},
                            {"markers", series.points.size()},
                            {"held_out_markers", held_out.size()},
                            {"band_points", series.band.size()},
                            {"fit", *series.fit}};
    }
    emit(report, format, out);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace scalelaw::cli
