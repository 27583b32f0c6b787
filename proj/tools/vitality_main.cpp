// vitality — repository maintenance-risk analytics pipeline.
//
// Stages: synth/ingest -> influence -> features -> train -> evaluate/ablate
// -> predict/plot. Every artifact under the workdir is deterministic for a
// fixed seed.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vitality/ablation.hpp"
#include "vitality/boosting.hpp"
#include "vitality/corpus.hpp"
#include "vitality/features.hpp"
#include "vitality/influence.hpp"
#include "vitality/metrics.hpp"
#include "vitality/pipeline.hpp"
#include "vitality/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace vitality;

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitMissingInput = 2;
constexpr int kExitValidation = 3;

struct RunConfig {
  std::string workdir;
  std::string events_path;
  std::string labels_path;
  int min_stars = -1;  // <0 = filter off
  std::string as_of;   // YYYY-MM; default derived from reference date
  std::string observation_end;
  std::string reference = "2018-07-01";  // GBSA reference date T
  std::string horizon = "6m";
  std::uint64_t seed = 42;
  std::string format = "csv";  // csv|json|table
  bool fail_fast = false;
  // train overrides
  survival::TrainConfig train;
  int tune_budget = 0;
  bool gbsa = false;
  double threshold = 0.5;  // gbsa decision threshold
  // plot
  std::string plot_repo;
  std::string plot_features =
      "stars,weight_rank_pct,latest_maintainer_activity_interval,maintainer_contrib_ratio";
  std::string plot_from, plot_to;
};

int parse_horizon_months(const std::string& s) {
  if (s.empty() || s.back() != 'm')
    throw ValidationError("horizon must look like '6m' (months): got '" + s + "'");
  int v = 0;
  try {
    std::size_t used = 0;
    v = std::stoi(s.substr(0, s.size() - 1), &used);
    if (used + 1 != s.size()) throw std::invalid_argument(s);
  } catch (const std::exception&) {
    throw ValidationError("horizon must look like '6m' (months): got '" + s + "'");
  }
  if (v < 1) throw ValidationError("horizon must be at least 1 month");
  return v;
}

// Features are aggregated through the last full month before the reference
// instant.
YearMonth snapshot_month(Instant reference) { return ym_of(reference - 1); }

fs::path artifact(const RunConfig& cfg, const char* name) {
  return fs::path(cfg.workdir) / name;
}

void require_file(const fs::path& p, const std::string& producer) {
  if (!fs::exists(p))
    throw MissingInputError("missing " + p.string() + "; run `vitality " + producer + "` first");
}

std::ofstream open_out(const fs::path& p) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw MissingInputError("cannot read " + p.string());
  return in;
}

CorpusStore load_timelines(const RunConfig& cfg) {
  const fs::path p = artifact(cfg, "timelines.json");
  require_file(p, "ingest (or synth + ingest)");
  auto in = open_in(p);
  return load_store(in);
}

// Echo of the effective configuration; part of every command's output set.
void write_manifest(const RunConfig& cfg, const std::string& command,
                    const std::vector<std::string>& artifacts) {
  ordered_json j;
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["workdir"] = cfg.workdir;
  if (!cfg.as_of.empty()) j["as_of"] = cfg.as_of;
  j["reference"] = cfg.reference;
  j["horizon"] = cfg.horizon;
  j["artifacts"] = artifacts;
  auto out = open_out(artifact(cfg, ("run_" + command + ".json").c_str()));
  out << j.dump(1) << '\n';
}

YearMonth effective_as_of(const RunConfig& cfg) {
  if (!cfg.as_of.empty()) return parse_year_month(cfg.as_of);
  return snapshot_month(parse_instant(cfg.reference));
}

// ---- commands ----

int cmd_synth(RunConfig& cfg, int healthy, int quiet, int decaying, int abrupt, bool uniform,
              const std::string& creation_from, const std::string& creation_to,
              const std::string& obs_end, const std::string& focus) {
  ScenarioSpec spec;
  spec.healthy = healthy;
  spec.quiet_maintained = quiet;
  spec.decaying = decaying;
  spec.abrupt_cease = abrupt;
  spec.uniform_surface = uniform;
  spec.creation_from = parse_year_month(creation_from);
  spec.creation_to = parse_year_month(creation_to);
  spec.observation_end = parse_year_month(obs_end);
  spec.cessation_focus = parse_year_month(focus);
  const auto timelines = generate_synthetic_corpus(spec, cfg.seed);
  {
    auto out = open_out(artifact(cfg, "events.jsonl"));
    write_events_jsonl(timelines, out);
  }
  {
    auto out = open_out(artifact(cfg, "labels.jsonl"));
    write_labels_jsonl(timelines, out);
  }
  write_manifest(cfg, "synth", {"events.jsonl", "labels.jsonl"});
  std::cout << "synth: " << timelines.size() << " repos -> events.jsonl, labels.jsonl\n";
  return 0;
}

int cmd_ingest(RunConfig& cfg) {
  const fs::path events_path = cfg.events_path.empty() ? artifact(cfg, "events.jsonl")
                                                       : fs::path(cfg.events_path);
  const fs::path labels_path = cfg.labels_path.empty() ? artifact(cfg, "labels.jsonl")
                                                       : fs::path(cfg.labels_path);
  if (!fs::exists(events_path))
    throw MissingInputError("missing events file " + events_path.string());
  if (!fs::exists(labels_path))
    throw MissingInputError("missing labels file " + labels_path.string());

  IngestOptions opts;
  if (cfg.min_stars >= 0) opts.min_stars = cfg.min_stars;
  opts.fail_fast = cfg.fail_fast;
  if (!cfg.observation_end.empty()) opts.observation_end = parse_year_month(cfg.observation_end);

  IngestReport report;
  auto events_in = open_in(events_path);
  auto timelines = ingest_events(events_in, opts, &report);
  YearMonth obs_end{1970, 1};
  if (opts.observation_end) {
    obs_end = *opts.observation_end;
  } else {
    for (const auto& t : timelines)
      if (!t.months.empty() && obs_end < t.months.back().month) obs_end = t.months.back().month;
  }
  auto labels_in = open_in(labels_path);
  const auto labels = read_labels(labels_in, cfg.fail_fast, &report);
  apply_labels(timelines, labels, obs_end, &report);

  CorpusStore store{obs_end, std::move(timelines)};
  {
    auto out = open_out(artifact(cfg, "timelines.json"));
    save_store(store, out);
  }
  {
    ordered_json j;
    j["lines"] = report.lines;
    j["events"] = report.events;
    j["malformed"] = report.malformed;
    j["repos_filtered"] = report.repos_filtered;
    j["post_cessation_events"] = report.post_cessation_events;
    j["errors"] = report.errors;
    j["warnings"] = report.warnings;
    auto out = open_out(artifact(cfg, "ingest_report.json"));
    out << j.dump(1) << '\n';
  }
  write_manifest(cfg, "ingest", {"timelines.json", "ingest_report.json"});
  std::cout << "ingest: " << store.timelines.size() << " repos, " << report.events << " events ("
            << report.malformed << " malformed, " << report.post_cessation_events
            << " post-cessation)\n";
  return 0;
}

int cmd_influence(RunConfig& cfg) {
  const CorpusStore store = load_timelines(cfg);
  const YearMonth as_of = effective_as_of(cfg);
  const auto snaps = pipeline::compute_influence(store.timelines, as_of);
  auto out = open_out(artifact(cfg, "influence.csv"));
  influence::write_snapshot_csv(snaps.weighted, snaps.normalized, out);
  write_manifest(cfg, "influence", {"influence.csv"});
  std::cout << "influence: " << snaps.normalized.size() << " repos at " << as_of.str()
            << (snaps.weighted.converged ? " (converged in " : " (max_iter hit at ")
            << snaps.weighted.iterations << " iterations)\n";
  return 0;
}

int cmd_features(RunConfig& cfg, const std::string& pr_keywords_path) {
  const fs::path influence_path = artifact(cfg, "influence.csv");
  require_file(influence_path, "influence");
  const CorpusStore store = load_timelines(cfg);
  const YearMonth as_of = effective_as_of(cfg);
  {
    // the influence stage must cover the same snapshot month
    auto in = open_in(influence_path);
    std::string header, row;
    std::getline(in, header);
    if (std::getline(in, row) && row.substr(0, 7) != as_of.str())
      throw ValidationError("influence.csv is for month " + row.substr(0, 7) +
                            " but features run at " + as_of.str() + "; rerun `vitality influence`");
  }
  features::PrKeywords kw;
  if (!pr_keywords_path.empty()) {
    auto in = open_in(pr_keywords_path);
    kw = features::load_pr_keywords(in);
  }
  const auto matrix =
      pipeline::snapshot_matrix(store.timelines, as_of, month_end(store.observation_end), kw);
  auto out = open_out(artifact(cfg, "features.csv"));
  features::write_matrix_csv(matrix, out);
  write_manifest(cfg, "features", {"features.csv"});
  std::cout << "features: " << matrix.rows.size() << " repos x " << matrix.column_names.size()
            << " columns at " << as_of.str() << " (pr keywords v" << kw.version << ")\n";
  return 0;
}

int cmd_train(RunConfig& cfg) {
  const fs::path features_path = artifact(cfg, "features.csv");
  require_file(features_path, "features");
  auto in = open_in(features_path);
  const auto matrix = features::read_matrix_csv(in);

  survival::TrainConfig train = cfg.train;
  train.seed = cfg.seed;

  std::vector<std::string> artifacts;
  if (cfg.gbsa) {
    const CorpusStore store = load_timelines(cfg);
    const Instant reference = parse_instant(cfg.reference);
    const int horizon = parse_horizon_months(cfg.horizon);
    const auto data = pipeline::gbsa_dataset(store.timelines, matrix, reference, horizon);
    if (cfg.tune_budget > 0) {
      const auto tuned =
          survival::tune_gbsa(data.samples, data.feature_names, {}, cfg.tune_budget, cfg.seed);
      auto tout = open_out(artifact(cfg, "trials.csv"));
      pipeline::write_trials_csv(tuned, tout);
      train = tuned.best;
      train.seed = cfg.seed;
      artifacts.push_back("trials.csv");
    }
    const auto fit = survival::gbsa_fit(data.samples, data.feature_names, train);
    auto mout = open_out(artifact(cfg, "model_gbsa.json"));
    survival::save_model(fit.model, mout);
    auto lout = open_out(artifact(cfg, "train_log.csv"));
    pipeline::write_train_log_csv(fit, lout);
    artifacts.insert(artifacts.end(), {"model_gbsa.json", "train_log.csv"});
    write_manifest(cfg, "train", artifacts);
    std::cout << "train: gbsa model with " << fit.model.trees.size() << " trees -> model_gbsa.json\n";
  } else {
    const auto samples = pipeline::to_samples(matrix);
    if (cfg.tune_budget > 0) {
      const auto tuned =
          survival::tune_aft(samples, matrix.column_names, {}, cfg.tune_budget, cfg.seed);
      auto tout = open_out(artifact(cfg, "trials.csv"));
      pipeline::write_trials_csv(tuned, tout);
      train = tuned.best;
      train.seed = cfg.seed;
      artifacts.push_back("trials.csv");
    }
    const auto fit = survival::fit(samples, matrix.column_names, train);
    auto mout = open_out(artifact(cfg, "model.json"));
    survival::save_model(fit.model, mout);
    auto lout = open_out(artifact(cfg, "train_log.csv"));
    pipeline::write_train_log_csv(fit, lout);
    artifacts.insert(artifacts.end(), {"model.json", "train_log.csv"});
    write_manifest(cfg, "train", artifacts);
    std::cout << "train: aft model with " << fit.model.trees.size() << " trees -> model.json\n";
  }
  return 0;
}

void emit_reports(const RunConfig& cfg, const std::vector<evalx::EvalReport>& reports,
                  const char* csv_name) {
  auto out = open_out(artifact(cfg, csv_name));
  evalx::write_reports_csv(reports, out);
  if (cfg.format == "table") {
    evalx::write_reports_table(reports, std::cout);
  } else if (cfg.format == "json") {
    ordered_json arr = ordered_json::array();
    for (const auto& r : reports) {
      ordered_json j;
      j["combo"] = r.combo;
      j["harrell_c"] = r.harrell_c;
      j["uno_c"] = r.uno_c;
      j["n_pairs_used"] = r.n_pairs_used;
      if (r.classifier_mode) {
        j["accuracy"] = r.accuracy;
        j["precision"] = r.precision;
        j["recall"] = r.recall;
        j["f1"] = r.f1;
      }
      j["config_fingerprint"] = r.config_fingerprint;
      arr.push_back(std::move(j));
    }
    std::cout << arr.dump(1) << '\n';
  } else {
    std::ostringstream ss;
    evalx::write_reports_csv(reports, ss);
    std::cout << ss.str();
  }
}

int cmd_evaluate(RunConfig& cfg) {
  const fs::path features_path = artifact(cfg, "features.csv");
  require_file(features_path, "features");
  auto in = open_in(features_path);
  const auto matrix = features::read_matrix_csv(in);
  survival::TrainConfig train = cfg.train;
  train.seed = cfg.seed;

  if (cfg.gbsa) {
    const CorpusStore store = load_timelines(cfg);
    const Instant reference = parse_instant(cfg.reference);
    const int horizon = parse_horizon_months(cfg.horizon);
    const auto data = pipeline::gbsa_dataset(store.timelines, matrix, reference, horizon);
    const auto eval = pipeline::evaluate_gbsa(data, train, 0.2, cfg.threshold);
    std::vector<evalx::EvalReport> reports{eval.report};
    emit_reports(cfg, reports, "report_gbsa.csv");
    write_manifest(cfg, "evaluate", {"report_gbsa.csv"});
    std::cout << "evaluate: gbsa balanced_accuracy=" << fmt_num(eval.balanced_accuracy) << '\n';
  } else {
    const auto report = pipeline::evaluate_aft(matrix, train);
    std::vector<evalx::EvalReport> reports{report};
    emit_reports(cfg, reports, "report.csv");
    write_manifest(cfg, "evaluate", {"report.csv"});
  }
  return 0;
}

int cmd_ablate(RunConfig& cfg) {
  const fs::path features_path = artifact(cfg, "features.csv");
  require_file(features_path, "features");
  auto in = open_in(features_path);
  const auto matrix = features::read_matrix_csv(in);

  evalx::AblateOptions opts;
  opts.train = cfg.train;
  opts.train.seed = cfg.seed;
  const auto reports = evalx::ablate(matrix, evalx::default_combos(), opts);
  emit_reports(cfg, reports, "ablation.csv");
  {
    auto out = open_out(artifact(cfg, "ablation.txt"));
    evalx::write_reports_table(reports, out);
  }
  // Split-count importance of the full model, aggregated per group.
  const auto samples = pipeline::to_samples(matrix);
  survival::TrainConfig train = cfg.train;
  train.seed = cfg.seed;
  const auto fit = survival::fit(samples, matrix.column_names, train);
  const auto importance = evalx::group_importance(fit.model, evalx::canonical_groups());
  {
    auto out = open_out(artifact(cfg, "importance.csv"));
    out << "group,score,zero_split_features\n";
    for (const auto& [tag, gi] : importance) {
      out << evalx::tag_name(tag) << ',' << fmt_num(gi.score) << ',';
      for (std::size_t i = 0; i < gi.zero_split_features.size(); ++i)
        out << (i ? ";" : "") << gi.zero_split_features[i];
      out << '\n';
    }
  }
  write_manifest(cfg, "ablate", {"ablation.csv", "ablation.txt", "importance.csv"});
  return 0;
}

int cmd_predict(RunConfig& cfg) {
  const CorpusStore store = load_timelines(cfg);
  const Instant reference = parse_instant(cfg.reference);
  const int horizon = parse_horizon_months(cfg.horizon);
  const fs::path gbsa_path = artifact(cfg, "model_gbsa.json");
  const fs::path aft_path = artifact(cfg, "model.json");
  const bool use_gbsa = cfg.gbsa || (fs::exists(gbsa_path) && !fs::exists(aft_path));
  const fs::path model_path = use_gbsa ? gbsa_path : aft_path;
  require_file(model_path, use_gbsa ? "train --gbsa" : "train");
  auto min = open_in(model_path);
  const auto model = survival::load_model(min);

  const YearMonth as_of = snapshot_month(reference);
  const auto matrix =
      pipeline::snapshot_matrix(store.timelines, as_of, month_end(store.observation_end));

  std::vector<std::pair<double, std::string>> rows;
  std::map<std::string, const RepoTimeline*> by_id;
  for (const auto& t : store.timelines) by_id[t.repo_id] = &t;
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    if (!by_id.at(matrix.repo_ids[i])->alive_at_instant(reference)) continue;
    const double risk = model.loss_kind == survival::LossKind::Logistic
                            ? model.predict_prob(matrix.rows[i])
                            : -model.predict_raw(matrix.rows[i]);
    rows.emplace_back(risk, matrix.repo_ids[i]);
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;  // descending risk
    return a.second < b.second;
  });
  {
    auto out = open_out(artifact(cfg, "predictions.csv"));
    out << "repo_id,risk\n";
    for (const auto& [risk, repo] : rows) out << repo << ',' << fmt_num(risk) << '\n';
  }
  write_manifest(cfg, "predict", {"predictions.csv"});
  std::cout << "predict: " << rows.size() << " repos scored at t=" << cfg.reference << " horizon "
            << horizon << "m -> predictions.csv\n";
  return 0;
}

int cmd_plot(RunConfig& cfg) {
  if (cfg.plot_repo.empty()) throw ValidationError("plot: --repo is required");
  const CorpusStore store = load_timelines(cfg);

  std::vector<std::string> feature_list;
  std::stringstream ss(cfg.plot_features);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) feature_list.push_back(item);

  const auto repo = std::find_if(store.timelines.begin(), store.timelines.end(),
                                 [&](const RepoTimeline& t) { return t.repo_id == cfg.plot_repo; });
  if (repo == store.timelines.end())
    throw ValidationError("plot: unknown repo '" + cfg.plot_repo + "'");
  const YearMonth from = cfg.plot_from.empty() ? repo->creation_month()
                                               : parse_year_month(cfg.plot_from);
  const YearMonth to = cfg.plot_to.empty() ? repo->months.back().month
                                           : parse_year_month(cfg.plot_to);

  const auto plot = pipeline::plot_series(store.timelines, cfg.plot_repo, feature_list, from, to);
  const std::string stem = "plot_" + [&] {
    std::string s = cfg.plot_repo;
    for (char& c : s)
      if (c == '/' || c == '\\') c = '_';
    return s;
  }();
  {
    auto out = open_out(artifact(cfg, (stem + ".csv").c_str()));
    pipeline::write_plot_csv(plot, out);
  }
  {
    auto out = open_out(artifact(cfg, (stem + ".svg").c_str()));
    pipeline::write_plot_svg(plot, out);
  }
  write_manifest(cfg, "plot", {stem + ".csv", stem + ".svg"});
  std::cout << "plot: " << cfg.plot_repo << " " << from.str() << ".." << to.str() << " -> " << stem
            << ".{csv,svg}\n";
  return 0;
}

void print_error(const std::string& command, int code, const std::string& message) {
  ordered_json j;
  j["error"]["command"] = command;
  j["error"]["code"] = code;
  j["error"]["message"] = message;
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vitality — repository maintenance-risk analytics"};
  app.require_subcommand(1);

  RunConfig cfg;
  if (const char* env = std::getenv("VITALITY_WORKDIR")) cfg.workdir = env;

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file with flag defaults");

  auto add_common = [&](CLI::App* sub) {
    sub->fallthrough();  // lets top-level options like --config follow the subcommand
    sub->add_option("--workdir", cfg.workdir, "artifact directory (env VITALITY_WORKDIR)");
    sub->add_option("--seed", cfg.seed, "seed for all randomness in this run");
    sub->add_option("--format", cfg.format, "report format: csv|json|table")
        ->check(CLI::IsMember({"csv", "json", "table"}));
  };

  int healthy = 70, quiet = 40, decaying = 70, abrupt = 40;
  bool uniform = false;
  std::string creation_from = "2014-01", creation_to = "2016-12", obs_end = "2019-12",
              focus = "2018-07";
  auto* synth = app.add_subcommand("synth", "generate the bundled synthetic corpus");
  add_common(synth);
  synth->add_option("--healthy", healthy, "steady, ongoing repos");
  synth->add_option("--quiet", quiet, "sparse-but-maintained repos");
  synth->add_option("--decaying", decaying, "gradually ceasing repos");
  synth->add_option("--abrupt", abrupt, "abruptly ceasing repos");
  synth->add_flag("--uniform-surface", uniform, "identical surface counts across repos");
  synth->add_option("--creation-from", creation_from, "earliest creation month (YYYY-MM)");
  synth->add_option("--creation-to", creation_to, "latest creation month (YYYY-MM)");
  synth->add_option("--observation-end", obs_end, "observation end month (YYYY-MM)");
  synth->add_option("--focus", focus, "cessation cluster month (YYYY-MM)");

  auto* ingest = app.add_subcommand("ingest", "parse events.jsonl/labels.jsonl into timelines");
  add_common(ingest);
  ingest->add_option("--events", cfg.events_path, "events.jsonl path");
  ingest->add_option("--labels", cfg.labels_path, "labels.jsonl path");
  ingest->add_option("--min-stars", cfg.min_stars, "drop repos with fewer lifetime stars");
  ingest->add_option("--observation-end", cfg.observation_end, "override end month (YYYY-MM)");
  ingest->add_flag("--fail-fast", cfg.fail_fast, "abort on the first malformed record");

  auto* influence_cmd = app.add_subcommand("influence", "user-repo influence snapshot");
  add_common(influence_cmd);
  influence_cmd->add_option("--as-of", cfg.as_of, "snapshot month (YYYY-MM)");

  std::string pr_keywords_path;
  auto* features_cmd = app.add_subcommand("features", "assemble the feature matrix");
  add_common(features_cmd);
  features_cmd->add_option("--as-of", cfg.as_of, "snapshot month (YYYY-MM)");
  features_cmd->add_option("--pr-keywords", pr_keywords_path,
                           "versioned keyword config (default: built-in v1 lists)");

  auto add_train_opts = [&](CLI::App* sub) {
    sub->add_option("--learning-rate", cfg.train.learning_rate);
    sub->add_option("--max-depth", cfg.train.max_depth);
    sub->add_option("--min-samples-leaf", cfg.train.min_samples_leaf);
    sub->add_option("--subsample", cfg.train.subsample);
    sub->add_option("--rounds", cfg.train.n_rounds);
    sub->add_option("--early-stopping", cfg.train.early_stopping_rounds);
    sub->add_option("--sigma", cfg.train.sigma, "AFT scale parameter");
    sub->add_flag("--gbsa", cfg.gbsa, "horizon classifier instead of the AFT model");
    sub->add_option("--t", cfg.reference, "reference date T (ISO-8601)");
    sub->add_option("--horizon", cfg.horizon, "prediction horizon, e.g. 6m");
    sub->add_option("--threshold", cfg.threshold, "gbsa decision threshold");
  };

  auto* train = app.add_subcommand("train", "fit the survival model (or --gbsa classifier)");
  add_common(train);
  add_train_opts(train);
  train->add_option("--tune", cfg.tune_budget, "random-search budget before the final fit");

  auto* evaluate = app.add_subcommand("evaluate", "held-out 80/20 evaluation");
  add_common(evaluate);
  add_train_opts(evaluate);

  auto* ablate_cmd = app.add_subcommand("ablate", "feature-group ablation grid");
  add_common(ablate_cmd);
  add_train_opts(ablate_cmd);

  auto* predict = app.add_subcommand("predict", "score repos alive at T, riskiest first");
  add_common(predict);
  predict->add_option("--t", cfg.reference, "reference date T (ISO-8601)");
  predict->add_option("--horizon", cfg.horizon, "prediction horizon, e.g. 6m");
  predict->add_flag("--gbsa", cfg.gbsa, "force the gbsa model");

  auto* plot = app.add_subcommand("plot", "monthly feature dynamics for one repo");
  add_common(plot);
  plot->add_option("--repo", cfg.plot_repo, "repository id")->required();
  plot->add_option("--features", cfg.plot_features, "comma-separated feature names");
  plot->add_option("--from", cfg.plot_from, "first month (YYYY-MM)");
  plot->add_option("--to", cfg.plot_to, "last month (YYYY-MM)");

  // --config provides defaults; explicit flags win.
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string_view(argv[i]) == "--config") {
      std::ifstream in(argv[i + 1]);
      if (!in) {
        print_error("config", kExitMissingInput, std::string("cannot read ") + argv[i + 1]);
        return kExitMissingInput;
      }
      const auto j = ordered_json::parse(in, nullptr, false);
      if (j.is_discarded()) {
        print_error("config", kExitValidation, "config file is not valid JSON");
        return kExitValidation;
      }
      if (j.contains("workdir")) cfg.workdir = j["workdir"].get<std::string>();
      if (j.contains("events")) cfg.events_path = j["events"].get<std::string>();
      if (j.contains("labels")) cfg.labels_path = j["labels"].get<std::string>();
      if (j.contains("min_stars")) cfg.min_stars = j["min_stars"].get<int>();
      if (j.contains("as_of")) cfg.as_of = j["as_of"].get<std::string>();
      if (j.contains("t")) cfg.reference = j["t"].get<std::string>();
      if (j.contains("horizon")) cfg.horizon = j["horizon"].get<std::string>();
      if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
      if (j.contains("learning_rate")) cfg.train.learning_rate = j["learning_rate"].get<double>();
      if (j.contains("max_depth")) cfg.train.max_depth = j["max_depth"].get<int>();
      if (j.contains("min_samples_leaf"))
        cfg.train.min_samples_leaf = j["min_samples_leaf"].get<int>();
      if (j.contains("subsample")) cfg.train.subsample = j["subsample"].get<double>();
      if (j.contains("rounds")) cfg.train.n_rounds = j["rounds"].get<int>();
      if (j.contains("sigma")) cfg.train.sigma = j["sigma"].get<double>();
      if (j.contains("plot_features")) cfg.plot_features = j["plot_features"].get<std::string>();
    }
  }

  CLI11_PARSE(app, argc, argv);

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    if (cfg.workdir.empty())
      throw ValidationError("no workdir: pass --workdir or set VITALITY_WORKDIR");
    if (synth->parsed())
      return cmd_synth(cfg, healthy, quiet, decaying, abrupt, uniform, creation_from, creation_to,
                       obs_end, focus);
    if (ingest->parsed()) return cmd_ingest(cfg);
    if (influence_cmd->parsed()) return cmd_influence(cfg);
    if (features_cmd->parsed()) return cmd_features(cfg, pr_keywords_path);
    if (train->parsed()) return cmd_train(cfg);
    if (evaluate->parsed()) return cmd_evaluate(cfg);
    if (ablate_cmd->parsed()) return cmd_ablate(cfg);
    if (predict->parsed()) return cmd_predict(cfg);
    if (plot->parsed()) return cmd_plot(cfg);
    return kExitInternal;
  } catch (const MissingInputError& e) {
    print_error(command, kExitMissingInput, e.what());
    return kExitMissingInput;
  } catch (const ValidationError& e) {
    print_error(command, kExitValidation, e.what());
    return kExitValidation;
  } catch (const std::exception& e) {
    print_error(command, kExitInternal, e.what());
    return kExitInternal;
  }
}
