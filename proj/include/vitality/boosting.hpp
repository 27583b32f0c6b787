#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vitality/core.hpp"
#include "vitality/timeline.hpp"

namespace vitality {
namespace survival {

// Flattened training sample; NaN marks a missing feature.
struct SurvivalSample {
  std::vector<double> features;
  double duration_months = 0;  // > 0
  bool event = false;          // true = cessation observed
};

// AFT with normal error on log-time. Returns (loss, d/dpred, d2/dpred2);
// the hessian is floored at 1e-16.
struct LossTriple {
  double loss = 0;
  double gradient = 0;
  double hessian = 0;
};
LossTriple aft_loss(double pred_log_t, double duration, bool event, double sigma);

// Logistic loss on {0,1} labels in log-odds space.
LossTriple logistic_loss(double pred_logit, bool label);

enum class LossKind { AftNormal, Logistic };

struct TreeNode {
  int feature = -1;  // -1 = leaf
  double threshold = 0;
  bool default_left = true;  // missing-value direction
  int left = -1;
  int right = -1;
  double leaf = 0;
};

struct Tree {
  std::vector<TreeNode> nodes;
  [[nodiscard]] double predict(std::span<const double> x) const;
};

struct TrainConfig {
  double learning_rate = 0.1;
  int max_depth = 4;
  int min_samples_leaf = 20;
  double subsample = 1.0;  // (0,1]
  int n_rounds = 200;
  int early_stopping_rounds = 20;  // 0 disables early stopping
  double sigma = 1.0;              // AFT scale
  std::uint64_t seed = 0;

  void validate() const;
  [[nodiscard]] std::string fingerprint_text() const;
};

struct BoostedModel {
  std::vector<Tree> trees;
  double learning_rate = 0.1;
  double base_score = 0;
  LossKind loss_kind = LossKind::AftNormal;
  double sigma = 1.0;
  std::vector<std::string> feature_names;

  // base_score + sum(learning_rate * leaf); for AFT this is predicted
  // log-lifespan (negate for a risk score), for Logistic it is log-odds.
  [[nodiscard]] double predict_raw(std::span<const double> x) const;
  [[nodiscard]] double predict_prob(std::span<const double> x) const;  // Logistic only
  // Splits per feature index across all trees.
  [[nodiscard]] std::vector<std::uint64_t> split_counts() const;
};

struct FitResult {
  BoostedModel model;
  std::vector<double> train_nloglik;  // per round, training fold
  std::vector<double> valid_nloglik;  // per round, empty if no validation fold
  int best_round = -1;                // index of the best validation round
};

// Second-order boosting with exact greedy splits at midpoints of sorted
// unique values, sparsity-aware default directions, and leaf = -G/(H+1).
// An internal stratified 80/20 split drives early stopping. Requires at
// least two uncensored samples.
FitResult fit(const std::vector<SurvivalSample>& samples,
              const std::vector<std::string>& feature_names, const TrainConfig& config);

// ---- horizon classifier ----

enum class HorizonLabel { Positive, Negative };

// Positive iff cessation falls in (T, T + horizon_months]. The repo must be
// alive at T.
HorizonLabel gbsa_label(const RepoTimeline& t, Instant reference, int horizon_months);

struct ClassifierSample {
  std::vector<double> features;
  bool positive = false;
};

// Downsamples the majority class to 1:1 (seeded), then fits a logistic
// boosted model. Requires both classes present.
FitResult gbsa_fit(const std::vector<ClassifierSample>& samples,
                   const std::vector<std::string>& feature_names, const TrainConfig& config);

// ---- seeded random hyperparameter search ----

struct SearchSpace {
  double learning_rate_min = 0.03, learning_rate_max = 0.3;  // log-uniform
  int max_depth_min = 2, max_depth_max = 6;
  int min_samples_leaf_min = 5, min_samples_leaf_max = 40;
  double subsample_min = 0.6, subsample_max = 1.0;
  double sigma_min = 0.5, sigma_max = 2.0;  // log-uniform, AFT only
  int n_rounds = 150;
  int early_stopping_rounds = 15;

  void validate() const;
};

struct Trial {
  TrainConfig config;
  double metric = 0;  // minimized
};

struct TuneResult {
  TrainConfig best;
  double best_metric = 0;
  std::vector<Trial> trials;
};

// Samples `budget` configs uniformly from the space and returns the one with
// the lowest validation metric (nloglik for AFT, negative balanced accuracy
// for the classifier). Deterministic for a fixed seed.
TuneResult tune_aft(const std::vector<SurvivalSample>& samples,
                    const std::vector<std::string>& feature_names, const SearchSpace& space,
                    int budget, std::uint64_t seed);
TuneResult tune_gbsa(const std::vector<ClassifierSample>& samples,
                     const std::vector<std::string>& feature_names, const SearchSpace& space,
                     int budget, std::uint64_t seed);

// Versioned JSON dump; predictions round-trip bit-exactly.
void save_model(const BoostedModel& m, std::ostream& out);
BoostedModel load_model(std::istream& in);

}  // namespace survival
}  // namespace vitality
