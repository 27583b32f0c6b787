#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vitality/ablation.hpp"
#include "vitality/boosting.hpp"
#include "vitality/features.hpp"
#include "vitality/influence.hpp"
#include "vitality/timeline.hpp"

namespace vitality {
namespace pipeline {

struct InfluenceSnapshots {
  influence::InfluenceState weighted;
  std::map<std::string, influence::NormalizedWeight> normalized;
  influence::InfluenceState raw_hits;  // unit weights, no decay
};

InfluenceSnapshots compute_influence(const std::vector<RepoTimeline>& timelines, YearMonth as_of);

// assemble + label: one row per repo alive at as_of, durations censored at
// observation_end.
features::FeatureMatrix snapshot_matrix(const std::vector<RepoTimeline>& timelines,
                                        YearMonth as_of, Instant observation_end,
                                        const features::PrKeywords& kw = {});

std::vector<survival::SurvivalSample> to_samples(const features::FeatureMatrix& m);

struct GbsaData {
  std::vector<std::string> repo_ids;
  std::vector<survival::ClassifierSample> samples;
  std::vector<double> duration_months;
  std::vector<std::uint8_t> event;
  std::vector<std::string> feature_names;
};

// Filters the snapshot to repos alive at the reference instant and attaches
// horizon labels.
GbsaData gbsa_dataset(const std::vector<RepoTimeline>& timelines,
                      const features::FeatureMatrix& at_reference, Instant reference,
                      int horizon_months);

// Seeded stratified 80/20 protocol: train on 80%, C-indices on the held-out
// 20% (Uno at the 80th-percentile tau unless overridden).
evalx::EvalReport evaluate_aft(const features::FeatureMatrix& matrix,
                               const survival::TrainConfig& config, double test_fraction = 0.2);

struct GbsaEvaluation {
  evalx::EvalReport report;  // classifier_mode set; harrell on probabilities
  double balanced_accuracy = 0;
  survival::FitResult fit;
};
GbsaEvaluation evaluate_gbsa(const GbsaData& data, const survival::TrainConfig& config,
                             double test_fraction = 0.2, double threshold = 0.5);

void write_train_log_csv(const survival::FitResult& result, std::ostream& out);
void write_trials_csv(const survival::TuneResult& result, std::ostream& out);

// Min-max map onto [0.1, 1]; a constant series maps to the 0.55 midpoint.
std::vector<double> minmax_normalize(const std::vector<double>& series);

struct PlotSeries {
  std::string feature;
  // One entry per month in [from, to]; NaN = missing.
  std::vector<double> normalized;
};

struct PlotData {
  std::string repo_id;
  YearMonth from, to;
  std::vector<PlotSeries> series;
};

// Per-feature monthly series for one repo, min-max normalized. Throws
// ValidationError listing valid names when a feature is unknown.
PlotData plot_series(const std::vector<RepoTimeline>& timelines, const std::string& repo_id,
                     const std::vector<std::string>& feature_list, YearMonth from, YearMonth to);

void write_plot_csv(const PlotData& plot, std::ostream& out);
void write_plot_svg(const PlotData& plot, std::ostream& out);

}  // namespace pipeline
}  // namespace vitality
