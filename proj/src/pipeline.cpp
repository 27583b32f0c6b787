#include "vitality/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "vitality/corpus.hpp"
#include "vitality/metrics.hpp"

namespace vitality {
namespace pipeline {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

InfluenceSnapshots compute_influence(const std::vector<RepoTimeline>& timelines, YearMonth as_of) {
  InfluenceSnapshots out;
  const auto edges = influence::build_edges(timelines, as_of);
  out.weighted = influence::run_hits(edges, as_of);
  if (!out.weighted.pqs.empty()) out.normalized = influence::normalize(out.weighted.pqs);
  const auto raw_edges = influence::build_edges(timelines, as_of, {.unit_weights = true});
  out.raw_hits = influence::run_hits(raw_edges, as_of);
  return out;
}

features::FeatureMatrix snapshot_matrix(const std::vector<RepoTimeline>& timelines,
                                        YearMonth as_of, Instant observation_end,
                                        const features::PrKeywords& kw) {
  const InfluenceSnapshots snaps = compute_influence(timelines, as_of);
  features::AssembleInputs in;
  in.timelines = &timelines;
  in.weighted = &snaps.weighted;
  in.normalized = &snaps.normalized;
  in.raw_hits = &snaps.raw_hits;
  const auto vectors = features::assemble(in, as_of, kw);
  return features::build_matrix(vectors, timelines, observation_end);
}

std::vector<survival::SurvivalSample> to_samples(const features::FeatureMatrix& m) {
  std::vector<survival::SurvivalSample> out;
  out.reserve(m.rows.size());
  for (std::size_t i = 0; i < m.rows.size(); ++i)
    out.push_back({m.rows[i], m.duration_months[i], m.event[i] != 0});
  return out;
}

GbsaData gbsa_dataset(const std::vector<RepoTimeline>& timelines,
                      const features::FeatureMatrix& at_reference, Instant reference,
                      int horizon_months) {
  std::map<std::string, const RepoTimeline*> by_id;
  for (const auto& t : timelines) by_id[t.repo_id] = &t;

  GbsaData out;
  out.feature_names = at_reference.column_names;
  for (std::size_t i = 0; i < at_reference.rows.size(); ++i) {
    auto it = by_id.find(at_reference.repo_ids[i]);
    if (it == by_id.end())
      throw ValidationError("gbsa: feature row for unknown repo " + at_reference.repo_ids[i]);
    const RepoTimeline& t = *it->second;
    if (!t.alive_at_instant(reference)) continue;
    const auto label = survival::gbsa_label(t, reference, horizon_months);
    out.repo_ids.push_back(t.repo_id);
    out.samples.push_back({at_reference.rows[i], label == survival::HorizonLabel::Positive});
    out.duration_months.push_back(at_reference.duration_months[i]);
    out.event.push_back(at_reference.event[i]);
  }
  return out;
}

evalx::EvalReport evaluate_aft(const features::FeatureMatrix& matrix,
                               const survival::TrainConfig& config, double test_fraction) {
  evalx::GroupCombo all{"All",
                        {evalx::GroupTag::S, evalx::GroupTag::U, evalx::GroupTag::M,
                         evalx::GroupTag::P},
                        {}};
  evalx::AblateOptions opts;
  opts.train = config;
  opts.test_fraction = test_fraction;
  return evalx::ablate(matrix, {all}, opts)[0];
}

GbsaEvaluation evaluate_gbsa(const GbsaData& data, const survival::TrainConfig& config,
                             double test_fraction, double threshold) {
  if (data.samples.empty()) throw ValidationError("gbsa: no samples alive at the reference date");
  if (!(threshold > 0) || !(threshold < 1))
    throw ValidationError("gbsa: decision threshold must be in (0,1)");

  std::mt19937_64 rng(config.seed);
  std::vector<int> pos, neg;
  for (int i = 0; i < static_cast<int>(data.samples.size()); ++i)
    (data.samples[static_cast<std::size_t>(i)].positive ? pos : neg).push_back(i);
  auto shuffle = [&rng](std::vector<int>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[static_cast<std::size_t>(rng_int(rng, 0, static_cast<std::int64_t>(i) - 1))]);
  };
  shuffle(pos);
  shuffle(neg);
  std::vector<int> train_ix, test_ix;
  auto take = [&](std::vector<int>& from) {
    const std::size_t n_test =
        static_cast<std::size_t>(std::floor(static_cast<double>(from.size()) * test_fraction));
    for (std::size_t i = 0; i < from.size(); ++i)
      (i < n_test ? test_ix : train_ix).push_back(from[i]);
  };
  take(pos);
  take(neg);
  std::sort(train_ix.begin(), train_ix.end());
  std::sort(test_ix.begin(), test_ix.end());
  if (test_ix.empty()) throw ValidationError("gbsa: test fold is empty; need more samples");

  std::vector<survival::ClassifierSample> train;
  for (int i : train_ix) train.push_back(data.samples[static_cast<std::size_t>(i)]);

  GbsaEvaluation out;
  out.fit = survival::gbsa_fit(train, data.feature_names, config);

  std::vector<std::uint8_t> pred, truth;
  std::vector<double> risk, durations;
  std::vector<std::uint8_t> events;
  for (int i : test_ix) {
    const auto& s = data.samples[static_cast<std::size_t>(i)];
    const double p = out.fit.model.predict_prob(s.features);
    pred.push_back(p >= threshold);
    truth.push_back(s.positive);
    risk.push_back(p);
    durations.push_back(data.duration_months[static_cast<std::size_t>(i)]);
    events.push_back(data.event[static_cast<std::size_t>(i)]);
  }
  const auto cm = evalx::classification_metrics(pred, truth);
  out.report.classifier_mode = true;
  out.report.combo = "GBSA";
  out.report.accuracy = cm.accuracy;
  out.report.precision = cm.precision;
  out.report.recall = cm.recall;
  out.report.f1 = cm.f1;
  const double tnr = (cm.tn + cm.fp) > 0
                         ? static_cast<double>(cm.tn) / static_cast<double>(cm.tn + cm.fp)
                         : 0.0;
  out.balanced_accuracy = 0.5 * (cm.recall + tnr);
  try {
    const auto h = evalx::harrell_c(risk, durations, events);
    out.report.harrell_c = h.value;
    out.report.n_pairs_used = h.pairs;
  } catch (const ValidationError&) {
    out.report.harrell_c = 0;  // no comparable pairs in the test fold
  }
  out.report.config_fingerprint = [&] {
    std::ostringstream os;
    os << std::hex << fnv1a64("gbsa|" + config.fingerprint_text());
    return os.str();
  }();
  return out;
}

void write_train_log_csv(const survival::FitResult& result, std::ostream& out) {
  out << "round,train_nloglik,valid_nloglik\n";
  for (std::size_t r = 0; r < result.train_nloglik.size(); ++r) {
    out << r << ',' << fmt_num(result.train_nloglik[r]) << ',';
    if (r < result.valid_nloglik.size()) out << fmt_num(result.valid_nloglik[r]);
    out << '\n';
  }
}

void write_trials_csv(const survival::TuneResult& result, std::ostream& out) {
  out << "trial,metric,learning_rate,max_depth,min_samples_leaf,subsample,sigma,n_rounds,seed\n";
  for (std::size_t i = 0; i < result.trials.size(); ++i) {
    const auto& t = result.trials[i];
    out << i << ',' << fmt_num(t.metric) << ',' << fmt_num(t.config.learning_rate) << ','
        << t.config.max_depth << ',' << t.config.min_samples_leaf << ','
        << fmt_num(t.config.subsample) << ',' << fmt_num(t.config.sigma) << ','
        << t.config.n_rounds << ',' << t.config.seed << '\n';
  }
}

std::vector<double> minmax_normalize(const std::vector<double>& series) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : series) {
    if (std::isnan(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::vector<double> out(series.size(), kNaN);
  if (!(lo <= hi)) return out;  // all missing
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (std::isnan(series[i])) continue;
    out[i] = lo == hi ? 0.55 : 0.1 + 0.9 * (series[i] - lo) / (hi - lo);
  }
  return out;
}

PlotData plot_series(const std::vector<RepoTimeline>& timelines, const std::string& repo_id,
                     const std::vector<std::string>& feature_list, YearMonth from, YearMonth to) {
  const auto& names = features::feature_names();
  std::vector<int> columns;
  for (const auto& f : feature_list) {
    const auto it = std::find(names.begin(), names.end(), f);
    if (it == names.end()) {
      std::string valid;
      for (const auto& n : names) valid += (valid.empty() ? "" : ", ") + n;
      throw ValidationError("unknown feature '" + f + "'; valid names: " + valid);
    }
    columns.push_back(static_cast<int>(it - names.begin()));
  }
  if (to < from) throw ValidationError("plot: empty month range");

  const auto repo = std::find_if(timelines.begin(), timelines.end(),
                                 [&](const RepoTimeline& t) { return t.repo_id == repo_id; });
  if (repo == timelines.end()) throw ValidationError("plot: unknown repo '" + repo_id + "'");

  PlotData plot;
  plot.repo_id = repo_id;
  plot.from = from;
  plot.to = to;
  const int n_months = months_between(from, to) + 1;
  std::vector<std::vector<double>> raw(feature_list.size(),
                                       std::vector<double>(static_cast<std::size_t>(n_months), kNaN));
  for (int i = 0; i < n_months; ++i) {
    const YearMonth m = add_months(from, i);
    if (!repo->alive_at(m)) continue;
    const InfluenceSnapshots snaps = compute_influence(timelines, m);
    features::AssembleInputs in;
    in.timelines = &timelines;
    in.weighted = &snaps.weighted;
    in.normalized = &snaps.normalized;
    in.raw_hits = &snaps.raw_hits;
    for (const auto& v : features::assemble(in, m)) {
      if (v.repo_id != repo_id) continue;
      const std::vector<double> flat = features::flatten(v);
      for (std::size_t f = 0; f < columns.size(); ++f)
        raw[f][static_cast<std::size_t>(i)] = flat[static_cast<std::size_t>(columns[f])];
      break;
    }
  }
  for (std::size_t f = 0; f < feature_list.size(); ++f)
    plot.series.push_back({feature_list[f], minmax_normalize(raw[f])});
  return plot;
}

void write_plot_csv(const PlotData& plot, std::ostream& out) {
  out << "month";
  for (const auto& s : plot.series) out << ',' << s.feature;
  out << '\n';
  const int n = months_between(plot.from, plot.to) + 1;
  for (int i = 0; i < n; ++i) {
    out << add_months(plot.from, i).str();
    for (const auto& s : plot.series) {
      out << ',';
      const double v = s.normalized[static_cast<std::size_t>(i)];
      if (!std::isnan(v)) out << fmt_num(v);
    }
    out << '\n';
  }
}

void write_plot_svg(const PlotData& plot, std::ostream& out) {
  constexpr int kWidth = 860, kHeight = 420;
  constexpr int kLeft = 60, kRight = 200, kTop = 40, kBottom = 50;
  const int plot_w = kWidth - kLeft - kRight;
  const int plot_h = kHeight - kTop - kBottom;
  const int n = months_between(plot.from, plot.to) + 1;
  static const char* kPalette[] = {"#e6762d", "#3572b0", "#2d9a4b", "#c03434",
                                   "#7b5cc0", "#947d2c", "#3a9a9a", "#b05c92"};

  auto x_of = [&](int i) {
    return kLeft + (n <= 1 ? plot_w / 2.0
                           : static_cast<double>(i) * plot_w / static_cast<double>(n - 1));
  };
  auto y_of = [&](double v) { return kTop + (1.05 - v) / 1.05 * plot_h; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << kLeft << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"15\">"
      << plot.repo_id << " — monthly feature dynamics (min-max [0.1,1])</text>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w
      << "\" y2=\"" << kTop + plot_h << "\" stroke=\"#444\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"#444\"/>\n";
  for (double tick : {0.1, 0.55, 1.0}) {
    out << "<text x=\"8\" y=\"" << fmt_num(y_of(tick) + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_num(tick) << "</text>\n";
    out << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << fmt_num(y_of(tick)) << "\" x2=\"" << kLeft
        << "\" y2=\"" << fmt_num(y_of(tick)) << "\" stroke=\"#444\"/>\n";
  }
  const int label_step = std::max(1, n / 8);
  for (int i = 0; i < n; i += label_step) {
    out << "<text x=\"" << fmt_num(x_of(i) - 18) << "\" y=\"" << kTop + plot_h + 18
        << "\" font-family=\"sans-serif\" font-size=\"10\">" << add_months(plot.from, i).str()
        << "</text>\n";
  }

  for (std::size_t s = 0; s < plot.series.size(); ++s) {
    const char* color = kPalette[s % 8];
    std::ostringstream path;
    bool open = false;
    for (int i = 0; i < n; ++i) {
      const double v = plot.series[s].normalized[static_cast<std::size_t>(i)];
      if (std::isnan(v)) {
        open = false;  // gap in the line for missing months
        continue;
      }
      path << (open ? " L" : " M") << fmt_num(x_of(i)) << ' ' << fmt_num(y_of(v));
      open = true;
    }
    out << "<path d=\"" << path.str().substr(path.str().empty() ? 0 : 1)
        << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\"/>\n";
    const int ly = kTop + 14 + static_cast<int>(s) * 18;
    out << "<line x1=\"" << kLeft + plot_w + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << kLeft + plot_w + 34 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kLeft + plot_w + 40 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << plot.series[s].feature
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace pipeline
}  // namespace vitality
