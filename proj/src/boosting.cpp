#include "vitality/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include <json.hpp>

namespace vitality {
namespace survival {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLambda = 1.0;       // L2 penalty on leaf values
constexpr double kHessFloor = 1e-16;
constexpr double kMinGain = 1e-12;
constexpr double kCdfFloor = 1e-12;   // survival-probability clamp

double norm_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * kPi); }
double norm_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

using Rng = std::mt19937_64;

template <class T>
void fisher_yates(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i)
    std::swap(v[i - 1], v[static_cast<std::size_t>(rng_int(rng, 0, static_cast<std::int64_t>(i) - 1))]);
}

}  // namespace

LossTriple aft_loss(double pred_log_t, double duration, bool event, double sigma) {
  if (!(duration > 0)) throw std::invalid_argument("aft_loss: duration must be positive");
  if (!(sigma > 0)) throw std::invalid_argument("aft_loss: sigma must be positive");
  const double z = (std::log(duration) - pred_log_t) / sigma;
  LossTriple out;
  if (event) {
    out.loss = 0.5 * z * z + 0.5 * std::log(2.0 * kPi) + std::log(sigma);
    out.gradient = -z / sigma;
    out.hessian = 1.0 / (sigma * sigma);
  } else {
    const double sf = std::max(norm_sf(z), kCdfFloor);
    const double pdf = norm_pdf(z);
    out.loss = -std::log(sf);
    out.gradient = -pdf / (sigma * sf);
    out.hessian = pdf * (pdf - z * sf) / (sigma * sigma * sf * sf);
  }
  out.hessian = std::max(out.hessian, kHessFloor);
  return out;
}

LossTriple logistic_loss(double pred_logit, bool label) {
  const double y = label ? 1.0 : 0.0;
  // softplus(x) = log(1 + e^x), computed without overflow
  const double softplus =
      pred_logit > 0 ? pred_logit + std::log1p(std::exp(-pred_logit)) : std::log1p(std::exp(pred_logit));
  const double p = 1.0 / (1.0 + std::exp(-pred_logit));
  LossTriple out;
  out.loss = softplus - y * pred_logit;
  out.gradient = p - y;
  out.hessian = std::max(p * (1.0 - p), kHessFloor);
  return out;
}

double Tree::predict(std::span<const double> x) const {
  int ix = 0;
  while (true) {
    const TreeNode& n = nodes[static_cast<std::size_t>(ix)];
    if (n.feature < 0) return n.leaf;
    const double v = x[static_cast<std::size_t>(n.feature)];
    const bool left = std::isnan(v) ? n.default_left : v < n.threshold;
    ix = left ? n.left : n.right;
  }
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw ValidationError("learning_rate must be positive");
  if (max_depth < 1) throw ValidationError("max_depth must be >= 1");
  if (min_samples_leaf < 1) throw ValidationError("min_samples_leaf must be >= 1");
  if (!(subsample > 0) || subsample > 1) throw ValidationError("subsample must be in (0,1]");
  if (n_rounds < 1) throw ValidationError("n_rounds must be >= 1");
  if (early_stopping_rounds < 0) throw ValidationError("early_stopping_rounds must be >= 0");
  if (!(sigma > 0)) throw ValidationError("sigma must be positive");
}

std::string TrainConfig::fingerprint_text() const {
  std::ostringstream os;
  os << "lr=" << fmt_num(learning_rate) << ";depth=" << max_depth << ";msl=" << min_samples_leaf
     << ";sub=" << fmt_num(subsample) << ";rounds=" << n_rounds
     << ";es=" << early_stopping_rounds << ";sigma=" << fmt_num(sigma) << ";seed=" << seed;
  return os.str();
}

double BoostedModel::predict_raw(std::span<const double> x) const {
  if (x.size() != feature_names.size())
    throw std::invalid_argument("predict: feature count mismatch");
  double acc = base_score;
  for (const Tree& t : trees) acc += learning_rate * t.predict(x);
  return acc;
}

double BoostedModel::predict_prob(std::span<const double> x) const {
  return 1.0 / (1.0 + std::exp(-predict_raw(x)));
}

std::vector<std::uint64_t> BoostedModel::split_counts() const {
  std::vector<std::uint64_t> counts(feature_names.size(), 0);
  for (const Tree& t : trees)
    for (const TreeNode& n : t.nodes)
      if (n.feature >= 0) ++counts[static_cast<std::size_t>(n.feature)];
  return counts;
}

namespace {

struct NodeStats {
  double g = 0, h = 0;
};

double leaf_score(const NodeStats& s) { return s.g * s.g / (s.h + kLambda); }

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& x, const std::vector<double>& grad,
              const std::vector<double>& hess, const TrainConfig& cfg)
      : x_(x), grad_(grad), hess_(hess), cfg_(cfg) {}

  Tree build(std::vector<int> rows) {
    Tree tree;
    grow(std::move(rows), 1, tree);
    return tree;
  }

 private:
  int grow(std::vector<int> rows, int depth, Tree& tree) {
    NodeStats total;
    for (int r : rows) {
      total.g += grad_[static_cast<std::size_t>(r)];
      total.h += hess_[static_cast<std::size_t>(r)];
    }
    const int node_ix = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[static_cast<std::size_t>(node_ix)].leaf = -total.g / (total.h + kLambda);
    if (depth > cfg_.max_depth ||
        rows.size() < 2 * static_cast<std::size_t>(cfg_.min_samples_leaf))
      return node_ix;

    const int n_features = static_cast<int>(x_[0].size());
    const double base = leaf_score(total);
    double best_gain = kMinGain;
    int best_feature = -1;
    double best_threshold = 0;
    bool best_default_left = true;

    std::vector<std::pair<double, int>> present;
    for (int f = 0; f < n_features; ++f) {
      present.clear();
      NodeStats miss;
      for (int r : rows) {
        const double v = x_[static_cast<std::size_t>(r)][static_cast<std::size_t>(f)];
        if (std::isnan(v)) {
          miss.g += grad_[static_cast<std::size_t>(r)];
          miss.h += hess_[static_cast<std::size_t>(r)];
        } else {
          present.emplace_back(v, r);
        }
      }
      if (present.size() < 2) continue;
      std::sort(present.begin(), present.end());
      const std::size_t n_miss = rows.size() - present.size();

      NodeStats left;
      for (std::size_t i = 0; i + 1 < present.size(); ++i) {
        left.g += grad_[static_cast<std::size_t>(present[i].second)];
        left.h += hess_[static_cast<std::size_t>(present[i].second)];
        if (present[i].first == present[i + 1].first) continue;
        const double threshold = present[i].first + (present[i + 1].first - present[i].first) / 2;
        const std::size_t n_left = i + 1;

        // missing values routed right
        {
          const std::size_t nl = n_left, nr = rows.size() - n_left;
          if (nl >= static_cast<std::size_t>(cfg_.min_samples_leaf) &&
              nr >= static_cast<std::size_t>(cfg_.min_samples_leaf)) {
            const NodeStats right{total.g - left.g, total.h - left.h};
            const double gain = 0.5 * (leaf_score(left) + leaf_score(right) - base);
            if (gain > best_gain) {
              best_gain = gain;
              best_feature = f;
              best_threshold = threshold;
              best_default_left = false;
            }
          }
        }
        // missing values routed left
        if (n_miss > 0) {
          const std::size_t nl = n_left + n_miss, nr = rows.size() - n_left - n_miss;
          if (nl >= static_cast<std::size_t>(cfg_.min_samples_leaf) &&
              nr >= static_cast<std::size_t>(cfg_.min_samples_leaf)) {
            const NodeStats l2{left.g + miss.g, left.h + miss.h};
            const NodeStats r2{total.g - l2.g, total.h - l2.h};
            const double gain = 0.5 * (leaf_score(l2) + leaf_score(r2) - base);
            if (gain > best_gain) {
              best_gain = gain;
              best_feature = f;
              best_threshold = threshold;
              best_default_left = true;
            }
          }
        }
      }
    }

    if (best_feature < 0) return node_ix;

    std::vector<int> left_rows, right_rows;
    for (int r : rows) {
      const double v = x_[static_cast<std::size_t>(r)][static_cast<std::size_t>(best_feature)];
      const bool go_left = std::isnan(v) ? best_default_left : v < best_threshold;
      (go_left ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const int left_ix = grow(std::move(left_rows), depth + 1, tree);
    const int right_ix = grow(std::move(right_rows), depth + 1, tree);
    TreeNode& node = tree.nodes[static_cast<std::size_t>(node_ix)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.default_left = best_default_left;
    node.left = left_ix;
    node.right = right_ix;
    return node_ix;
  }

  const std::vector<std::vector<double>>& x_;
  const std::vector<double>& grad_;
  const std::vector<double>& hess_;
  const TrainConfig& cfg_;
};

struct Objective {
  LossKind kind;
  double sigma;
  // AFT: y = duration, flag = event. Logistic: flag = label, y unused.
  LossTriple eval(double pred, double y, bool flag) const {
    return kind == LossKind::AftNormal ? aft_loss(pred, y, flag, sigma)
                                       : logistic_loss(pred, flag);
  }
};

// Stratified 80/20 split by the boolean flag; deterministic under the rng.
void stratified_split(const std::vector<std::uint8_t>& flag, Rng& rng, std::vector<int>& train,
                      std::vector<int>& valid, double valid_fraction = 0.2) {
  std::vector<int> pos, neg;
  for (int i = 0; i < static_cast<int>(flag.size()); ++i)
    (flag[static_cast<std::size_t>(i)] ? pos : neg).push_back(i);
  fisher_yates(pos, rng);
  fisher_yates(neg, rng);
  auto take = [&](std::vector<int>& from) {
    const std::size_t n_valid =
        static_cast<std::size_t>(std::floor(static_cast<double>(from.size()) * valid_fraction));
    for (std::size_t i = 0; i < from.size(); ++i)
      (i < n_valid ? valid : train).push_back(from[i]);
  };
  take(pos);
  take(neg);
  std::sort(train.begin(), train.end());
  std::sort(valid.begin(), valid.end());
}

FitResult fit_impl(const std::vector<std::vector<double>>& x, const std::vector<double>& y,
                   const std::vector<std::uint8_t>& flag,
                   const std::vector<std::string>& feature_names, const Objective& obj,
                   const TrainConfig& cfg, double base_score) {
  Rng rng(cfg.seed);
  std::vector<int> train, valid;
  stratified_split(flag, rng, train, valid);
  const bool early_stop = cfg.early_stopping_rounds > 0 && !valid.empty();
  if (train.empty()) train = valid;  // degenerate tiny input

  FitResult result;
  BoostedModel& model = result.model;
  model.learning_rate = cfg.learning_rate;
  model.base_score = base_score;
  model.loss_kind = obj.kind;
  model.sigma = obj.sigma;
  model.feature_names = feature_names;

  std::vector<double> pred(x.size(), base_score);
  std::vector<double> grad(x.size(), 0), hess(x.size(), 0);

  auto mean_loss = [&](const std::vector<int>& rows) {
    double s = 0;
    for (int r : rows)
      s += obj.eval(pred[static_cast<std::size_t>(r)], y[static_cast<std::size_t>(r)],
                    flag[static_cast<std::size_t>(r)] != 0)
               .loss;
    return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
  };

  double best_valid = std::numeric_limits<double>::infinity();
  int best_round = -1;

  for (int round = 0; round < cfg.n_rounds; ++round) {
    for (int r : train) {
      const auto lt = obj.eval(pred[static_cast<std::size_t>(r)], y[static_cast<std::size_t>(r)],
                               flag[static_cast<std::size_t>(r)] != 0);
      grad[static_cast<std::size_t>(r)] = lt.gradient;
      hess[static_cast<std::size_t>(r)] = lt.hessian;
    }
    std::vector<int> rows = train;
    if (cfg.subsample < 1.0) {
      fisher_yates(rows, rng);
      rows.resize(std::max<std::size_t>(
          1, static_cast<std::size_t>(std::ceil(static_cast<double>(rows.size()) * cfg.subsample))));
      std::sort(rows.begin(), rows.end());
    }
    TreeBuilder builder(x, grad, hess, cfg);
    Tree tree = builder.build(std::move(rows));
    for (std::size_t i = 0; i < x.size(); ++i)
      pred[i] += cfg.learning_rate * tree.predict(x[i]);
    model.trees.push_back(std::move(tree));

    result.train_nloglik.push_back(mean_loss(train));
    if (!valid.empty()) {
      const double v = mean_loss(valid);
      result.valid_nloglik.push_back(v);
      if (v < best_valid - 1e-12) {
        best_valid = v;
        best_round = round;
      } else if (early_stop && round - best_round >= cfg.early_stopping_rounds) {
        break;
      }
    }
  }

  if (early_stop && best_round >= 0)
    model.trees.resize(static_cast<std::size_t>(best_round) + 1);
  result.best_round = best_round;
  return result;
}

}  // namespace

FitResult fit(const std::vector<SurvivalSample>& samples,
              const std::vector<std::string>& feature_names, const TrainConfig& config) {
  config.validate();
  if (samples.empty()) throw ValidationError("fit: no samples");
  std::size_t n_events = 0;
  for (const auto& s : samples) {
    if (s.features.size() != feature_names.size())
      throw ValidationError("fit: feature vector length mismatch");
    if (!(s.duration_months > 0)) throw ValidationError("fit: durations must be positive");
    n_events += s.event;
  }
  if (n_events < 2)
    throw ValidationError(
        "fit: needs at least 2 uncensored samples; the all-censored likelihood is unbounded");

  std::vector<std::vector<double>> x;
  std::vector<double> y;
  std::vector<std::uint8_t> flag;
  double base = 0;
  for (const auto& s : samples) {
    x.push_back(s.features);
    y.push_back(s.duration_months);
    flag.push_back(s.event ? 1 : 0);
    base += std::log(s.duration_months);
  }
  base /= static_cast<double>(samples.size());

  return fit_impl(x, y, flag, feature_names, Objective{LossKind::AftNormal, config.sigma}, config,
                  base);
}

HorizonLabel gbsa_label(const RepoTimeline& t, Instant reference, int horizon_months) {
  if (horizon_months < 1) throw ValidationError("horizon must be positive");
  if (!t.alive_at_instant(reference))
    throw std::invalid_argument("gbsa_label: repo not alive at the reference date");
  if (t.label.ceased()) {
    const Instant cess = *t.label.cessation_time;
    const Instant end = add_months_instant(reference, horizon_months);
    if (cess > reference && cess <= end) return HorizonLabel::Positive;
  }
  return HorizonLabel::Negative;
}

FitResult gbsa_fit(const std::vector<ClassifierSample>& samples,
                   const std::vector<std::string>& feature_names, const TrainConfig& config) {
  config.validate();
  std::vector<int> pos, neg;
  for (int i = 0; i < static_cast<int>(samples.size()); ++i) {
    if (samples[static_cast<std::size_t>(i)].features.size() != feature_names.size())
      throw ValidationError("gbsa_fit: feature vector length mismatch");
    (samples[static_cast<std::size_t>(i)].positive ? pos : neg).push_back(i);
  }
  if (pos.empty() || neg.empty())
    throw ValidationError("gbsa_fit: both classes must be present");

  // Seeded 1:1 downsampling of the majority class.
  Rng rng(config.seed);
  std::vector<int>& majority = pos.size() > neg.size() ? pos : neg;
  const std::size_t keep = std::min(pos.size(), neg.size());
  fisher_yates(majority, rng);
  majority.resize(keep);
  std::vector<int> chosen;
  chosen.insert(chosen.end(), pos.begin(), pos.end());
  chosen.insert(chosen.end(), neg.begin(), neg.end());
  std::sort(chosen.begin(), chosen.end());

  std::vector<std::vector<double>> x;
  std::vector<double> y;
  std::vector<std::uint8_t> flag;
  for (int i : chosen) {
    const auto& s = samples[static_cast<std::size_t>(i)];
    x.push_back(s.features);
    y.push_back(s.positive ? 1.0 : 0.0);
    flag.push_back(s.positive ? 1 : 0);
  }
  return fit_impl(x, y, flag, feature_names, Objective{LossKind::Logistic, 1.0}, config, 0.0);
}

void SearchSpace::validate() const {
  auto check = [](double lo, double hi, const char* what) {
    if (!(lo > 0) || hi < lo) throw ValidationError(std::string("search space: bad range for ") + what);
  };
  check(learning_rate_min, learning_rate_max, "learning_rate");
  check(subsample_min, subsample_max, "subsample");
  check(sigma_min, sigma_max, "sigma");
  if (max_depth_min < 1 || max_depth_max < max_depth_min)
    throw ValidationError("search space: bad range for max_depth");
  if (min_samples_leaf_min < 1 || min_samples_leaf_max < min_samples_leaf_min)
    throw ValidationError("search space: bad range for min_samples_leaf");
  if (n_rounds < 1) throw ValidationError("search space: n_rounds must be >= 1");
}

namespace {

TrainConfig sample_config(const SearchSpace& space, Rng& rng, std::uint64_t trial_seed) {
  TrainConfig c;
  c.learning_rate =
      std::exp(rng_range(rng, std::log(space.learning_rate_min), std::log(space.learning_rate_max)));
  c.max_depth = static_cast<int>(rng_int(rng, space.max_depth_min, space.max_depth_max));
  c.min_samples_leaf =
      static_cast<int>(rng_int(rng, space.min_samples_leaf_min, space.min_samples_leaf_max));
  c.subsample = rng_range(rng, space.subsample_min, space.subsample_max);
  c.sigma = std::exp(rng_range(rng, std::log(space.sigma_min), std::log(space.sigma_max)));
  c.n_rounds = space.n_rounds;
  c.early_stopping_rounds = space.early_stopping_rounds;
  c.seed = trial_seed;
  return c;
}

template <class FitFn, class MetricFn>
TuneResult tune_impl(const SearchSpace& space, int budget, std::uint64_t seed, FitFn fit_fn,
                     MetricFn metric_fn) {
  space.validate();
  if (budget < 1) throw ValidationError("tune: budget must be >= 1");
  Rng rng(seed);
  TuneResult result;
  for (int i = 0; i < budget; ++i) {
    const TrainConfig cfg = sample_config(space, rng, seed + static_cast<std::uint64_t>(i));
    const BoostedModel model = fit_fn(cfg);
    const double metric = metric_fn(model);
    result.trials.push_back({cfg, metric});
    if (result.trials.size() == 1 || metric < result.best_metric) {
      result.best_metric = metric;
      result.best = cfg;
    }
  }
  return result;
}

}  // namespace

TuneResult tune_aft(const std::vector<SurvivalSample>& samples,
                    const std::vector<std::string>& feature_names, const SearchSpace& space,
                    int budget, std::uint64_t seed) {
  // Outer split reserved for trial scoring; identical across trials.
  std::vector<std::uint8_t> flag;
  for (const auto& s : samples) flag.push_back(s.event ? 1 : 0);
  Rng split_rng(seed);
  std::vector<int> train_ix, eval_ix;
  stratified_split(flag, split_rng, train_ix, eval_ix);
  if (eval_ix.empty()) eval_ix = train_ix;

  std::vector<SurvivalSample> train;
  for (int i : train_ix) train.push_back(samples[static_cast<std::size_t>(i)]);

  return tune_impl(
      space, budget, seed,
      [&](const TrainConfig& cfg) { return fit(train, feature_names, cfg).model; },
      [&](const BoostedModel& model) {
        double s = 0;
        for (int i : eval_ix) {
          const auto& smp = samples[static_cast<std::size_t>(i)];
          s += aft_loss(model.predict_raw(smp.features), smp.duration_months, smp.event,
                        model.sigma)
                   .loss;
        }
        return s / static_cast<double>(eval_ix.size());
      });
}

TuneResult tune_gbsa(const std::vector<ClassifierSample>& samples,
                     const std::vector<std::string>& feature_names, const SearchSpace& space,
                     int budget, std::uint64_t seed) {
  std::vector<std::uint8_t> flag;
  for (const auto& s : samples) flag.push_back(s.positive ? 1 : 0);
  Rng split_rng(seed);
  std::vector<int> train_ix, eval_ix;
  stratified_split(flag, split_rng, train_ix, eval_ix);
  if (eval_ix.empty()) eval_ix = train_ix;

  std::vector<ClassifierSample> train;
  for (int i : train_ix) train.push_back(samples[static_cast<std::size_t>(i)]);

  return tune_impl(
      space, budget, seed,
      [&](const TrainConfig& cfg) { return gbsa_fit(train, feature_names, cfg).model; },
      [&](const BoostedModel& model) {
        // negative balanced accuracy at the 0.5 threshold
        std::uint64_t tp = 0, tn = 0, np = 0, nn = 0;
        for (int i : eval_ix) {
          const auto& smp = samples[static_cast<std::size_t>(i)];
          const bool hat = model.predict_prob(smp.features) >= 0.5;
          if (smp.positive) {
            ++np;
            tp += hat;
          } else {
            ++nn;
            tn += !hat;
          }
        }
        const double tpr = np ? static_cast<double>(tp) / static_cast<double>(np) : 0.0;
        const double tnr = nn ? static_cast<double>(tn) / static_cast<double>(nn) : 0.0;
        return -0.5 * (tpr + tnr);
      });
}

// ---- model serialization ----

namespace {
using nlohmann::ordered_json;
}

void save_model(const BoostedModel& m, std::ostream& out) {
  ordered_json j;
  j["format"] = "vitality-model";
  j["version"] = 1;
  j["loss"] = m.loss_kind == LossKind::AftNormal ? "aft_normal" : "logistic";
  j["sigma"] = m.sigma;
  j["base_score"] = m.base_score;
  j["learning_rate"] = m.learning_rate;
  j["feature_names"] = m.feature_names;
  ordered_json trees = ordered_json::array();
  for (const Tree& t : m.trees) {
    ordered_json nodes = ordered_json::array();
    for (const TreeNode& n : t.nodes) {
      ordered_json node;
      if (n.feature < 0) {
        node["leaf"] = n.leaf;
      } else {
        node["feature"] = n.feature;
        node["threshold"] = n.threshold;
        node["default_left"] = n.default_left;
        node["left"] = n.left;
        node["right"] = n.right;
      }
      nodes.push_back(std::move(node));
    }
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
  out << j.dump(1) << '\n';
}

BoostedModel load_model(std::istream& in) {
  ordered_json j = ordered_json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("format", "") != "vitality-model")
    throw ValidationError("model file: malformed or wrong format");
  BoostedModel m;
  const std::string loss = j.at("loss").get<std::string>();
  if (loss == "aft_normal") {
    m.loss_kind = LossKind::AftNormal;
  } else if (loss == "logistic") {
    m.loss_kind = LossKind::Logistic;
  } else {
    throw ValidationError("model file: unknown loss '" + loss + "'");
  }
  m.sigma = j.at("sigma").get<double>();
  m.base_score = j.at("base_score").get<double>();
  m.learning_rate = j.at("learning_rate").get<double>();
  m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
  for (const auto& tj : j.at("trees")) {
    Tree t;
    for (const auto& nj : tj) {
      TreeNode n;
      if (nj.contains("leaf")) {
        n.leaf = nj.at("leaf").get<double>();
      } else {
        n.feature = nj.at("feature").get<int>();
        n.threshold = nj.at("threshold").get<double>();
        n.default_left = nj.at("default_left").get<bool>();
        n.left = nj.at("left").get<int>();
        n.right = nj.at("right").get<int>();
        if (n.feature >= static_cast<int>(m.feature_names.size()))
          throw ValidationError("model file: split references an unknown feature index");
      }
      t.nodes.push_back(n);
    }
    m.trees.push_back(std::move(t));
  }
  return m;
}

}  // namespace survival
}  // namespace vitality
