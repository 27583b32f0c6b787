#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vitality/timeline.hpp"

namespace vitality {
namespace influence {

// Interaction base weights and the temporal decay of one action: an action at
// ordinal k among the N_p actions a repository has seen decays by
// 1 / (1 + k / N_p), favoring early engagement.
struct DecayContext {
  std::uint64_t k = 1;    // 1-indexed position within the repo's action stream
  std::uint64_t n_p = 1;  // total actions on the repo in the snapshot window
};

inline constexpr double kStarWeight = 1.0;
inline constexpr double kCommitWeight = 8.0;
inline constexpr double kForkWeight = 4.0;
inline constexpr double kIssueWeight = 2.0;

// In [0.5, 1); strictly decreasing in k for fixed n_p.
double decay_factor(const DecayContext& ctx);

// 8 * log10(loc) * decay, 0 when loc == 0.
double commit_weight(std::uint64_t loc, double decay);

struct EdgeWeight {
  std::string user_id;
  std::string repo_id;
  double w_star = 0;
  double w_commit = 0;
  double w_fork = 0;
  double w_issue = 0;
  [[nodiscard]] double total() const { return w_star + w_commit + w_fork + w_issue; }
};

struct EdgeOptions {
  // With unit_weights, every interaction contributes weight 1 with no decay
  // and no LOC term — the raw propagation used as the standalone H feature.
  bool unit_weights = false;
};

// One edge per (user, repo) pair with any interaction at or before the end of
// `as_of`. Stars count once per pair; forks/issues (PR opens included) sum per
// event with per-event decay; commits follow the log-LOC rule. Zero-weight
// pairs are retained. Output sorted by (repo_id, user_id).
std::vector<EdgeWeight> build_edges(const std::vector<RepoTimeline>& timelines, YearMonth as_of,
                                    const EdgeOptions& opts = {});

struct InfluenceState {
  YearMonth snapshot_month;
  std::map<std::string, double> pqs;  // repo -> project quality score, L1-normalized
  std::map<std::string, double> uis;  // user -> influence score, L1-normalized
  int iterations = 0;
  bool converged = false;
};

struct HitsOptions {
  double tol = 1e-9;   // max absolute score change
  int max_iter = 100;
};

// Alternating propagation: PQS(p) = sum_u w_up * UIS(u), then L1-normalize
// over repos; UIS(u) = sum_p w_up * PQS(p), then L1-normalize over users.
// Scores start at 1. An all-zero-weight graph yields uniform scores.
InfluenceState run_hits(const std::vector<EdgeWeight>& edges, YearMonth snapshot_month,
                        const HitsOptions& opts = {});

// Per-repo user-centric scalar (the snapshot PQS); absent repos score 0.
std::map<std::string, double> weight_feature(const std::vector<EdgeWeight>& edges,
                                             const InfluenceState& state);

struct NormalizedWeight {
  std::string repo_id;
  double raw = 0;
  double pct_rank = 0;  // in (0,1], average-rank ties
  double zscore = 0;    // of ln(raw) over strictly positive raws
};

// Percentile rank plus log z-score. Zero raws take the window-minimum zscore;
// a degenerate window (all ln equal, or no positive raw) zeroes the zscores.
std::map<std::string, NormalizedWeight> normalize(const std::map<std::string, double>& raw);

// `month,repo_id,weight,weight_rank_pct,weight_zscore` rows sorted by repo_id.
void write_snapshot_csv(const InfluenceState& state,
                        const std::map<std::string, NormalizedWeight>& normalized,
                        std::ostream& out);

}  // namespace influence
}  // namespace vitality
