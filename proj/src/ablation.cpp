#include "vitality/ablation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace vitality {
namespace evalx {

namespace {

using features::FeatureMatrix;
using survival::SurvivalSample;

std::vector<int> column_indices(const FeatureMatrix& matrix, const GroupCombo& combo) {
  std::set<std::string> wanted;
  const auto& groups = canonical_groups();
  for (GroupTag tag : combo.include) {
    const auto it = std::find_if(groups.begin(), groups.end(),
                                 [&](const FeatureGroup& g) { return g.tag == tag; });
    wanted.insert(it->members.begin(), it->members.end());
  }
  for (const auto& drop : combo.exclude) {
    if (!wanted.count(drop))
      throw ValidationError("combo '" + combo.name + "': cannot drop absent feature '" + drop + "'");
    wanted.erase(drop);
  }
  if (wanted.empty()) throw ValidationError("combo '" + combo.name + "' selects no features");

  std::vector<int> cols;
  for (const auto& name : wanted) {  // set order: deterministic by name
    const auto it = std::find(matrix.column_names.begin(), matrix.column_names.end(), name);
    if (it == matrix.column_names.end())
      throw ValidationError("combo '" + combo.name + "' references absent column '" + name + "'");
    cols.push_back(static_cast<int>(it - matrix.column_names.begin()));
  }
  return cols;
}

double percentile_nearest_rank(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const std::size_t rank =
      static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
  return values[std::max<std::size_t>(1, rank) - 1];
}

}  // namespace

const std::vector<FeatureGroup>& canonical_groups() {
  static const std::vector<FeatureGroup> groups{
      {GroupTag::S, {"stars", "commits", "issues", "prs", "tags", "comments"}},
      {GroupTag::H, {"hits_raw"}},
      {GroupTag::U, {"weight", "weight_rank_pct", "weight_zscore"}},
      {GroupTag::M,
       {"latest_maintainer_activity_interval", "avg_response_time", "response_decay_trend"}},
      {GroupTag::P,
       {"maintainer_contrib_ratio", "contrib_diversity", "balance_index", "activity_deviation",
        "quarterly_deviation", "feature_ratio", "bugfix_ratio", "bugfix_feature_ratio"}},
  };
  return groups;
}

std::vector<GroupCombo> default_combos() {
  using T = GroupTag;
  return {
      {"S", {T::S}, {}},
      {"S - stars", {T::S}, {"stars"}},
      {"S + H", {T::S, T::H}, {}},
      {"S + U", {T::S, T::U}, {}},
      {"S + M", {T::S, T::M}, {}},
      {"S + P", {T::S, T::P}, {}},
      {"U + M + P", {T::U, T::M, T::P}, {}},
      {"All", {T::S, T::U, T::M, T::P}, {}},
  };
}

std::string tag_name(GroupTag tag) {
  switch (tag) {
    case GroupTag::S: return "S";
    case GroupTag::H: return "H";
    case GroupTag::U: return "U";
    case GroupTag::M: return "M";
    case GroupTag::P: return "P";
  }
  return "?";
}

std::vector<EvalReport> ablate(const FeatureMatrix& matrix, const std::vector<GroupCombo>& combos,
                               const AblateOptions& opts) {
  if (matrix.rows.empty()) throw ValidationError("ablate: empty feature matrix");

  // One stratified train/test split shared by every combo.
  std::mt19937_64 rng(opts.train.seed);
  std::vector<int> ev, cen;
  for (int i = 0; i < static_cast<int>(matrix.rows.size()); ++i)
    (matrix.event[static_cast<std::size_t>(i)] ? ev : cen).push_back(i);
  auto shuffle = [&rng](std::vector<int>& v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[static_cast<std::size_t>(rng_int(rng, 0, static_cast<std::int64_t>(i) - 1))]);
  };
  shuffle(ev);
  shuffle(cen);
  std::vector<int> train_ix, test_ix;
  auto take = [&](std::vector<int>& from) {
    const std::size_t n_test = static_cast<std::size_t>(
        std::floor(static_cast<double>(from.size()) * opts.test_fraction));
    for (std::size_t i = 0; i < from.size(); ++i)
      (i < n_test ? test_ix : train_ix).push_back(from[i]);
  };
  take(ev);
  take(cen);
  std::sort(train_ix.begin(), train_ix.end());
  std::sort(test_ix.begin(), test_ix.end());
  if (test_ix.empty()) throw ValidationError("ablate: test fold is empty; need more samples");

  std::vector<double> test_durations;
  for (int i : test_ix) test_durations.push_back(matrix.duration_months[static_cast<std::size_t>(i)]);
  const double tau = opts.uno_tau ? *opts.uno_tau : percentile_nearest_rank(test_durations, 0.8);

  std::vector<EvalReport> reports;
  for (const auto& combo : combos) {
    const std::vector<int> cols = column_indices(matrix, combo);
    auto project = [&](int row) {
      std::vector<double> out;
      out.reserve(cols.size());
      for (int c : cols) out.push_back(matrix.rows[static_cast<std::size_t>(row)][static_cast<std::size_t>(c)]);
      return out;
    };
    std::vector<std::string> names;
    for (int c : cols) names.push_back(matrix.column_names[static_cast<std::size_t>(c)]);

    std::vector<SurvivalSample> train;
    for (int i : train_ix)
      train.push_back(SurvivalSample{project(i), matrix.duration_months[static_cast<std::size_t>(i)],
                                     matrix.event[static_cast<std::size_t>(i)] != 0});
    const survival::BoostedModel model = survival::fit(train, names, opts.train).model;

    std::vector<double> risk, durations;
    std::vector<std::uint8_t> events;
    for (int i : test_ix) {
      risk.push_back(-model.predict_raw(project(i)));
      durations.push_back(matrix.duration_months[static_cast<std::size_t>(i)]);
      events.push_back(matrix.event[static_cast<std::size_t>(i)]);
    }

    EvalReport r;
    r.combo = combo.name;
    const ConcordanceResult h = harrell_c(risk, durations, events);
    r.harrell_c = h.value;
    r.n_pairs_used = h.pairs;
    r.uno_c = uno_c(risk, durations, events, tau).value;
    r.config_fingerprint = [&] {
      std::ostringstream os;
      os << std::hex << fnv1a64(combo.name + "|" + opts.train.fingerprint_text() + "|tau=" + fmt_num(tau));
      return os.str();
    }();
    reports.push_back(std::move(r));
  }
  return reports;
}

void write_reports_csv(const std::vector<EvalReport>& reports, std::ostream& out) {
  out << "combo,harrell_c,uno_c,n_pairs_used,accuracy,precision,recall,f1,config_fingerprint\n";
  for (const auto& r : reports) {
    out << r.combo << ',' << fmt_num(r.harrell_c) << ',' << fmt_num(r.uno_c) << ','
        << r.n_pairs_used << ',';
    if (r.classifier_mode)
      out << fmt_num(r.accuracy) << ',' << fmt_num(r.precision) << ',' << fmt_num(r.recall) << ','
          << fmt_num(r.f1);
    else
      out << ",,,";
    out << ',' << r.config_fingerprint << '\n';
  }
}

void write_reports_table(const std::vector<EvalReport>& reports, std::ostream& out) {
  std::size_t width = 8;
  for (const auto& r : reports) width = std::max(width, r.combo.size());
  out << std::left << std::setw(static_cast<int>(width + 2)) << "Features"
      << std::setw(20) << "Harrell's C-index" << "Uno's C-index\n";
  for (const auto& r : reports) {
    std::ostringstream h, u;
    h << std::fixed << std::setprecision(3) << r.harrell_c;
    u << std::fixed << std::setprecision(3) << r.uno_c;
    out << std::left << std::setw(static_cast<int>(width + 2)) << r.combo << std::setw(20)
        << h.str() << u.str() << '\n';
  }
}

std::map<GroupTag, GroupImportance> group_importance(const survival::BoostedModel& model,
                                                     const std::vector<FeatureGroup>& groups) {
  const std::vector<std::uint64_t> counts = model.split_counts();
  std::map<GroupTag, GroupImportance> out;
  for (const auto& group : groups) {
    GroupImportance gi;
    double log_sum = 0;
    int used = 0;
    for (const auto& name : group.members) {
      const auto it = std::find(model.feature_names.begin(), model.feature_names.end(), name);
      if (it == model.feature_names.end()) {
        gi.zero_split_features.push_back(name);  // not in the model at all
        continue;
      }
      const std::uint64_t f = counts[static_cast<std::size_t>(it - model.feature_names.begin())];
      if (f == 0) {
        gi.zero_split_features.push_back(name);
      } else {
        log_sum += std::log(static_cast<double>(f));
        ++used;
      }
    }
    if (used > 0) {
      gi.score = std::exp(log_sum / used);
    } else {
      gi.no_used_features = true;
    }
    out[group.tag] = std::move(gi);
  }
  return out;
}

}  // namespace evalx
}  // namespace vitality
