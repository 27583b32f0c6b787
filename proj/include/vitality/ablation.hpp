#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vitality/boosting.hpp"
#include "vitality/features.hpp"
#include "vitality/metrics.hpp"

namespace vitality {
namespace evalx {

enum class GroupTag { S, H, U, M, P };

struct FeatureGroup {
  GroupTag tag;
  std::vector<std::string> members;
};

// The canonical partition: S = surface counts, H = the raw propagation score
// alone, U = weight + its normalizations, M = maintainer signals,
// P = evolution signals.
const std::vector<FeatureGroup>& canonical_groups();

struct GroupCombo {
  std::string name;                    // e.g. "S + U"
  std::vector<GroupTag> include;
  std::vector<std::string> exclude;    // dropped columns, e.g. "stars"
};

// {S, S - stars, S + H, S + U, S + M, S + P, U + M + P, All}; All = S+U+M+P.
std::vector<GroupCombo> default_combos();

struct EvalReport {
  std::string combo;
  double harrell_c = 0;
  double uno_c = 0;
  std::uint64_t n_pairs_used = 0;
  double accuracy = 0, precision = 0, recall = 0, f1 = 0;  // classifier mode only
  bool classifier_mode = false;
  std::string config_fingerprint;
};

struct AblateOptions {
  survival::TrainConfig train;
  double test_fraction = 0.2;
  std::optional<double> uno_tau;  // default: 80th percentile of test durations
};

// Trains one AFT model per combo on an identical seeded train/test split and
// reports both C-indices on the held-out fold.
std::vector<EvalReport> ablate(const features::FeatureMatrix& matrix,
                               const std::vector<GroupCombo>& combos, const AblateOptions& opts);

void write_reports_csv(const std::vector<EvalReport>& reports, std::ostream& out);
void write_reports_table(const std::vector<EvalReport>& reports, std::ostream& out);

struct GroupImportance {
  double score = 0;  // geometric mean of per-feature split counts > 0
  std::vector<std::string> zero_split_features;
  bool no_used_features = false;
};

// Per-feature F-score = split count across the ensemble, aggregated per group
// by geometric mean over features that were used at least once.
std::map<GroupTag, GroupImportance> group_importance(const survival::BoostedModel& model,
                                                     const std::vector<FeatureGroup>& groups);

std::string tag_name(GroupTag tag);

}  // namespace evalx
}  // namespace vitality
