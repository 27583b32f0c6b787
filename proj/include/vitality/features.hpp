#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vitality/influence.hpp"
#include "vitality/timeline.hpp"

namespace vitality {
namespace features {

// Users with at least one direct commit or PR merge at or before as_of.
struct MaintainerSet {
  std::string repo_id;
  YearMonth as_of;
  std::set<std::string> members;
};

MaintainerSet identify_maintainers(const RepoTimeline& t, YearMonth as_of);

// Months since the latest event of any kind by any maintainer. Falls back to
// months since creation (flagged) when the maintainer set is empty.
struct InactivityResult {
  int months = 0;
  bool no_maintainers = false;
};
InactivityResult maintainer_inactivity(const RepoTimeline& t, const MaintainerSet& maintainers,
                                       YearMonth as_of);

// Mean first-maintainer-touch latency over threads opened in the trailing
// 6 months, and the OLS slope of the monthly means (positive = degradation).
struct ResponseLatency {
  std::optional<double> avg_hours;
  std::optional<double> trend_hours_per_month;
  double unresponded_fraction = 0;  // diagnostic only
};
ResponseLatency response_latency(const RepoTimeline& t, const MaintainerSet& maintainers,
                                 YearMonth as_of, int window_months = 6);

// Maintainer share of substantial actions (commits, merges, issue opens),
// squared imbalance, and 1 - Gini of per-user action counts in the window.
struct ContributionStructure {
  double maintainer_contrib_ratio = 0;
  double balance_index = 0.25;
  std::optional<double> contrib_diversity;
};
ContributionStructure contribution_structure(const RepoTimeline& t,
                                             const MaintainerSet& maintainers, YearMonth as_of,
                                             int window_months = 6);

// Gini over non-negative counts: sum |x_i - x_j| / (2 n^2 mu); 0 when degenerate.
double gini(const std::vector<double>& counts);

// Composite core activity (mean of commits/issues/prs) deviations: recent
// 3-month mean z-scored against the full monthly history, and the last
// quarter against the previous three quarters.
struct ActivityDeviation {
  double activity_deviation = 0;
  std::optional<double> quarterly_deviation;  // needs >= 4 quarters of history
};
struct ActivityOptions {
  // When set, each of the three component series is z-scored against its own
  // history before averaging; the default keeps raw counts interpretable.
  bool zscore_components = false;
};
ActivityDeviation activity_deviation(const RepoTimeline& t, YearMonth as_of,
                                     const ActivityOptions& opts = {});

enum class PrCategory { Feature, Bugfix, Other };

// Versioned whole-word keyword lists; Bugfix wins when both match.
struct PrKeywords {
  int version = 1;
  std::vector<std::string> feature{"feature", "feat", "add", "implement", "support", "introduce"};
  std::vector<std::string> bugfix{"fix", "bug", "patch", "repair", "hotfix", "resolve"};
};

PrCategory classify_pr(std::string_view title, const PrKeywords& kw = {});

// Reads a keyword config (fields: version, feature[], bugfix[]); the shipped
// config/pr_keywords.json pins version 1 to the built-in defaults.
PrKeywords load_pr_keywords(std::istream& in);

struct PrFocus {
  std::optional<double> feature_ratio;
  std::optional<double> bugfix_ratio;
  std::optional<double> bugfix_feature_ratio;  // missing when no feature PRs
};
PrFocus pr_focus(const RepoTimeline& t, YearMonth as_of, int window_months = 6,
                 const PrKeywords& kw = {});

// One row of the model matrix; field names follow the feature table exactly.
struct FeatureVector {
  std::string repo_id;
  YearMonth as_of;
  // surface (cumulative to date)
  double stars = 0, commits = 0, issues = 0, prs = 0, tags = 0, comments = 0;
  // user-centric
  double weight = 0, weight_rank_pct = 0, weight_zscore = 0;
  // maintainer-centric
  double latest_maintainer_activity_interval = 0;
  std::optional<double> avg_response_time;       // hours
  std::optional<double> response_decay_trend;    // hours/month
  // project evolution
  double maintainer_contrib_ratio = 0;
  std::optional<double> contrib_diversity;
  double balance_index = 0.25;
  double activity_deviation = 0;
  std::optional<double> quarterly_deviation;
  std::optional<double> feature_ratio;
  std::optional<double> bugfix_ratio;
  std::optional<double> bugfix_feature_ratio;
  // ablation-only raw propagation score (unit weights, no decay)
  double hits_raw = 0;
};

// Canonical column order: 6 surface + 3 user + 3 maintainer + 8 evolution.
const std::array<std::string, 20>& feature_names();
// feature_names() + "hits_raw".
const std::vector<std::string>& matrix_column_names();

// Flattened values in matrix_column_names() order; missing = NaN.
std::vector<double> flatten(const FeatureVector& v);

struct AssembleInputs {
  const std::vector<RepoTimeline>* timelines = nullptr;
  const influence::InfluenceState* weighted = nullptr;                    // design snapshot
  const std::map<std::string, influence::NormalizedWeight>* normalized = nullptr;
  const influence::InfluenceState* raw_hits = nullptr;                    // unit-weight snapshot
};

// One vector per repo alive at as_of. Repos absent from the influence
// snapshot get weight 0 and the window-minimum zscore.
std::vector<FeatureVector> assemble(const AssembleInputs& in, YearMonth as_of,
                                    const PrKeywords& kw = {});

// ---- labeled matrix + CSV ----

struct FeatureMatrix {
  std::vector<std::string> column_names;  // matrix_column_names()
  std::vector<std::string> repo_ids;
  std::vector<YearMonth> as_of;
  std::vector<std::vector<double>> rows;  // NaN = missing
  std::vector<double> duration_months;
  std::vector<std::uint8_t> event;  // 1 = cessation observed
};

FeatureMatrix build_matrix(const std::vector<FeatureVector>& vectors,
                           const std::vector<RepoTimeline>& timelines, Instant observation_end);

// Header: repo_id,as_of,<features...>,hits_raw,duration_months,event.
// Missing values serialize as empty cells.
void write_matrix_csv(const FeatureMatrix& m, std::ostream& out);
FeatureMatrix read_matrix_csv(std::istream& in);

}  // namespace features
}  // namespace vitality
