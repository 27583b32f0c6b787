#include "vitality/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "vitality/corpus.hpp"

namespace vitality {
namespace features {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool in_window(YearMonth m, YearMonth as_of, int window_months) {
  const int d = months_between(m, as_of);
  return d >= 0 && d < window_months;
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double pop_std(const std::vector<double>& v, double mu) {
  if (v.empty()) return 0;
  double s = 0;
  for (double x : v) s += (x - mu) * (x - mu);
  const double sd = std::sqrt(s / static_cast<double>(v.size()));
  // constant series accumulate rounding residue; treat it as zero variance
  return sd <= 1e-9 * std::max(1.0, std::abs(mu)) ? 0.0 : sd;
}

// Least-squares slope of y over x; requires >= 2 points.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double mx = mean(x), my = mean(y);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - mx) * (y[i] - my);
    den += (x[i] - mx) * (x[i] - mx);
  }
  return den > 0 ? num / den : 0.0;
}

}  // namespace

MaintainerSet identify_maintainers(const RepoTimeline& t, YearMonth as_of) {
  MaintainerSet set{t.repo_id, as_of, {}};
  const Instant cutoff = month_end(as_of);
  for (const auto& e : t.events) {
    if (e.timestamp > cutoff) break;
    if (e.kind == EventKind::Commit || e.kind == EventKind::PrMerge) set.members.insert(e.user_id);
  }
  return set;
}

InactivityResult maintainer_inactivity(const RepoTimeline& t, const MaintainerSet& maintainers,
                                       YearMonth as_of) {
  if (maintainers.members.empty())
    return {months_between(t.creation_month(), as_of), true};
  const Instant cutoff = month_end(as_of);
  Instant latest = -1;
  for (const auto& e : t.events) {
    if (e.timestamp > cutoff) break;
    if (maintainers.members.count(e.user_id)) latest = std::max(latest, e.timestamp);
  }
  if (latest < 0) return {months_between(t.creation_month(), as_of), true};
  return {months_between(ym_of(latest), as_of), false};
}

ResponseLatency response_latency(const RepoTimeline& t, const MaintainerSet& maintainers,
                                 YearMonth as_of, int window_months) {
  const Instant cutoff = month_end(as_of);

  // First maintainer touch per thread (comment, merge).
  std::unordered_map<std::string, Instant> first_touch;
  for (const auto& e : t.events) {
    if (e.timestamp > cutoff) break;
    if (!e.thread_id || !maintainers.members.count(e.user_id)) continue;
    if (e.kind != EventKind::IssueComment && e.kind != EventKind::PrComment &&
        e.kind != EventKind::PrMerge)
      continue;
    auto [it, inserted] = first_touch.try_emplace(*e.thread_id, e.timestamp);
    if (!inserted) it->second = std::min(it->second, e.timestamp);
  }

  std::vector<double> latencies;
  std::vector<std::vector<double>> monthly(static_cast<std::size_t>(window_months));
  std::size_t opened = 0, unresponded = 0;
  for (const auto& e : t.events) {
    if (e.timestamp > cutoff) break;
    if (e.kind != EventKind::IssueOpen && e.kind != EventKind::PrOpen) continue;
    if (!e.thread_id) continue;  // unlinkable threads are ignored
    const YearMonth m = ym_of(e.timestamp);
    if (!in_window(m, as_of, window_months)) continue;
    ++opened;
    auto it = first_touch.find(*e.thread_id);
    if (it == first_touch.end() || it->second < e.timestamp) {
      ++unresponded;
      continue;
    }
    const double hours = static_cast<double>(it->second - e.timestamp) / 3600.0;
    latencies.push_back(hours);
    monthly[static_cast<std::size_t>(months_between(m, as_of))].push_back(hours);
  }

  ResponseLatency out;
  if (opened > 0) out.unresponded_fraction = static_cast<double>(unresponded) / static_cast<double>(opened);
  if (latencies.empty()) return out;
  out.avg_hours = mean(latencies);

  std::vector<double> xs, ys;
  for (int back = window_months - 1; back >= 0; --back) {
    const auto& bucket = monthly[static_cast<std::size_t>(back)];
    if (bucket.empty()) continue;
    xs.push_back(static_cast<double>(window_months - 1 - back));  // oldest month = 0
    ys.push_back(mean(bucket));
  }
  if (xs.size() >= 2) out.trend_hours_per_month = ols_slope(xs, ys);
  return out;
}

double gini(const std::vector<double>& counts) {
  const std::size_t n = counts.size();
  if (n == 0) return 0;
  double total = 0;
  for (double x : counts) total += x;
  if (!(total > 0)) return 0;
  std::vector<double> sorted(counts);
  std::sort(sorted.begin(), sorted.end());
  // sum_i (2i - n - 1) x_(i) equals the pairwise |x_i - x_j| sum.
  double num = 0;
  for (std::size_t i = 0; i < n; ++i)
    num += (2.0 * static_cast<double>(i + 1) - static_cast<double>(n) - 1.0) * sorted[i];
  const double mu = total / static_cast<double>(n);
  return num / (static_cast<double>(n) * static_cast<double>(n) * mu);
}

ContributionStructure contribution_structure(const RepoTimeline& t,
                                             const MaintainerSet& maintainers, YearMonth as_of,
                                             int window_months) {
  const Instant cutoff = month_end(as_of);
  std::size_t substantial = 0, by_maintainer = 0;
  std::map<std::string, double> per_user;
  for (const auto& e : t.events) {
    if (e.timestamp > cutoff) break;
    if (!in_window(ym_of(e.timestamp), as_of, window_months)) continue;
    if (e.kind != EventKind::MetaUpdate) per_user[e.user_id] += 1;
    const bool is_substantial = e.kind == EventKind::Commit || e.kind == EventKind::PrMerge ||
                                e.kind == EventKind::IssueOpen;
    if (!is_substantial) continue;
    ++substantial;
    if (maintainers.members.count(e.user_id)) ++by_maintainer;
  }

  ContributionStructure out;
  if (substantial > 0)
    out.maintainer_contrib_ratio =
        static_cast<double>(by_maintainer) / static_cast<double>(substantial);
  const double d = out.maintainer_contrib_ratio - 0.5;
  out.balance_index = d * d;
  if (!per_user.empty()) {
    std::vector<double> counts;
    counts.reserve(per_user.size());
    for (const auto& [user, c] : per_user) counts.push_back(c);
    out.contrib_diversity = 1.0 - gini(counts);
  }
  return out;
}

ActivityDeviation activity_deviation(const RepoTimeline& t, YearMonth as_of,
                                     const ActivityOptions& opts) {
  const YearMonth first = t.creation_month();
  if (as_of < first) throw std::invalid_argument("activity_deviation: as_of precedes creation");
  const int n = months_between(first, as_of) + 1;
  std::array<std::vector<double>, 3> series;
  for (auto& s : series) s.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    if (const MonthBucket* b = t.bucket(add_months(first, i))) {
      series[0][static_cast<std::size_t>(i)] = static_cast<double>(b->commits);
      series[1][static_cast<std::size_t>(i)] = static_cast<double>(b->issues);
      series[2][static_cast<std::size_t>(i)] = static_cast<double>(b->prs);
    }
  }
  if (opts.zscore_components) {
    for (auto& s : series) {
      const double smu = mean(s);
      const double ssd = pop_std(s, smu);
      for (double& v : s) v = ssd > 0 ? (v - smu) / ssd : 0.0;
    }
  }
  std::vector<double> composite(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    composite[static_cast<std::size_t>(i)] =
        (series[0][static_cast<std::size_t>(i)] + series[1][static_cast<std::size_t>(i)] +
         series[2][static_cast<std::size_t>(i)]) /
        3.0;

  ActivityDeviation out;
  const double mu = mean(composite);
  const double sd = pop_std(composite, mu);
  const int recent_n = std::min(3, n);
  double recent = 0;
  for (int i = n - recent_n; i < n; ++i) recent += composite[static_cast<std::size_t>(i)];
  recent /= static_cast<double>(recent_n);
  out.activity_deviation = sd > 0 ? (recent - mu) / sd : 0.0;

  if (n >= 12) {
    auto quarter_mean = [&](int back) {  // back = 0 is the quarter ending at as_of
      double s = 0;
      for (int i = 0; i < 3; ++i) s += composite[static_cast<std::size_t>(n - 1 - back * 3 - i)];
      return s / 3.0;
    };
    const double last = quarter_mean(0);
    const std::vector<double> prev{quarter_mean(1), quarter_mean(2), quarter_mean(3)};
    const double pmu = mean(prev);
    const double psd = pop_std(prev, pmu);
    out.quarterly_deviation = psd > 0 ? (last - pmu) / psd : 0.0;
  }
  return out;
}

PrCategory classify_pr(std::string_view title, const PrKeywords& kw) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : title) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));

  auto matches = [&](const std::vector<std::string>& words) {
    for (const auto& tok : tokens)
      for (const auto& w : words)
        if (tok == w) return true;
    return false;
  };
  if (matches(kw.bugfix)) return PrCategory::Bugfix;  // bugfix wins on a double match
  if (matches(kw.feature)) return PrCategory::Feature;
  return PrCategory::Other;
}

PrKeywords load_pr_keywords(std::istream& in) {
  const auto j = nlohmann::ordered_json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ValidationError("pr keywords: malformed JSON config");
  PrKeywords kw;
  kw.version = j.value("version", 0);
  if (kw.version < 1) throw ValidationError("pr keywords: missing or invalid version");
  kw.feature = j.at("feature").get<std::vector<std::string>>();
  kw.bugfix = j.at("bugfix").get<std::vector<std::string>>();
  if (kw.feature.empty() || kw.bugfix.empty())
    throw ValidationError("pr keywords: both lists must be non-empty");
  return kw;
}

PrFocus pr_focus(const RepoTimeline& t, YearMonth as_of, int window_months, const PrKeywords& kw) {
  const Instant cutoff = month_end(as_of);
  std::size_t total = 0, feature = 0, bugfix = 0;
  for (const auto& e : t.events) {
    if (e.timestamp > cutoff) break;
    if (e.kind != EventKind::PrOpen) continue;
    if (!in_window(ym_of(e.timestamp), as_of, window_months)) continue;
    ++total;
    switch (classify_pr(e.title ? *e.title : std::string_view{}, kw)) {
      case PrCategory::Feature: ++feature; break;
      case PrCategory::Bugfix: ++bugfix; break;
      case PrCategory::Other: break;
    }
  }
  PrFocus out;
  if (total == 0) return out;
  out.feature_ratio = static_cast<double>(feature) / static_cast<double>(total);
  out.bugfix_ratio = static_cast<double>(bugfix) / static_cast<double>(total);
  if (feature > 0) out.bugfix_feature_ratio = static_cast<double>(bugfix) / static_cast<double>(feature);
  return out;
}

const std::array<std::string, 20>& feature_names() {
  static const std::array<std::string, 20> names{
      "stars",
      "commits",
      "issues",
      "prs",
      "tags",
      "comments",
      "weight",
      "weight_rank_pct",
      "weight_zscore",
      "latest_maintainer_activity_interval",
      "avg_response_time",
      "response_decay_trend",
      "maintainer_contrib_ratio",
      "contrib_diversity",
      "balance_index",
      "activity_deviation",
      "quarterly_deviation",
      "feature_ratio",
      "bugfix_ratio",
      "bugfix_feature_ratio",
  };
  return names;
}

const std::vector<std::string>& matrix_column_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v(feature_names().begin(), feature_names().end());
    v.push_back("hits_raw");
    return v;
  }();
  return names;
}

std::vector<double> flatten(const FeatureVector& v) {
  auto opt = [](const std::optional<double>& o) { return o ? *o : kNaN; };
  return {
      v.stars,
      v.commits,
      v.issues,
      v.prs,
      v.tags,
      v.comments,
      v.weight,
      v.weight_rank_pct,
      v.weight_zscore,
      v.latest_maintainer_activity_interval,
      opt(v.avg_response_time),
      opt(v.response_decay_trend),
      v.maintainer_contrib_ratio,
      opt(v.contrib_diversity),
      v.balance_index,
      v.activity_deviation,
      opt(v.quarterly_deviation),
      opt(v.feature_ratio),
      opt(v.bugfix_ratio),
      opt(v.bugfix_feature_ratio),
      v.hits_raw,
  };
}

std::vector<FeatureVector> assemble(const AssembleInputs& in, YearMonth as_of,
                                    const PrKeywords& kw) {
  if (!in.timelines || !in.weighted || !in.normalized)
    throw std::invalid_argument("assemble: timelines and influence snapshot are required");

  double min_z = 0;
  bool first = true;
  for (const auto& [repo, w] : *in.normalized) {
    if (first || w.zscore < min_z) min_z = w.zscore;
    first = false;
  }

  std::vector<FeatureVector> out;
  for (const auto& t : *in.timelines) {
    if (!t.alive_at(as_of)) continue;
    FeatureVector v;
    v.repo_id = t.repo_id;
    v.as_of = as_of;

    for (const auto& b : t.months) {
      if (as_of < b.month) break;
      v.stars += b.stars;
      v.commits += b.commits;
      v.issues += b.issues;
      v.prs += b.prs;
      v.tags += b.tags;
      v.comments += b.comments;
    }

    if (auto it = in.weighted->pqs.find(t.repo_id); it != in.weighted->pqs.end())
      v.weight = it->second;
    if (auto it = in.normalized->find(t.repo_id); it != in.normalized->end()) {
      v.weight_rank_pct = it->second.pct_rank;
      v.weight_zscore = it->second.zscore;
    } else {
      v.weight_rank_pct = 0;
      v.weight_zscore = min_z;
    }
    if (in.raw_hits) {
      if (auto it = in.raw_hits->pqs.find(t.repo_id); it != in.raw_hits->pqs.end())
        v.hits_raw = it->second;
    }

    const MaintainerSet maints = identify_maintainers(t, as_of);
    v.latest_maintainer_activity_interval =
        static_cast<double>(maintainer_inactivity(t, maints, as_of).months);
    const ResponseLatency latency = response_latency(t, maints, as_of);
    v.avg_response_time = latency.avg_hours;
    v.response_decay_trend = latency.trend_hours_per_month;
    const ContributionStructure cs = contribution_structure(t, maints, as_of);
    v.maintainer_contrib_ratio = cs.maintainer_contrib_ratio;
    v.balance_index = cs.balance_index;
    v.contrib_diversity = cs.contrib_diversity;
    const ActivityDeviation dev = activity_deviation(t, as_of);
    v.activity_deviation = dev.activity_deviation;
    v.quarterly_deviation = dev.quarterly_deviation;
    const PrFocus focus = pr_focus(t, as_of, 6, kw);
    v.feature_ratio = focus.feature_ratio;
    v.bugfix_ratio = focus.bugfix_ratio;
    v.bugfix_feature_ratio = focus.bugfix_feature_ratio;
    out.push_back(std::move(v));
  }
  return out;
}

FeatureMatrix build_matrix(const std::vector<FeatureVector>& vectors,
                           const std::vector<RepoTimeline>& timelines, Instant observation_end) {
  std::unordered_map<std::string, const RepoTimeline*> by_id;
  for (const auto& t : timelines) by_id[t.repo_id] = &t;

  FeatureMatrix m;
  m.column_names = matrix_column_names();
  for (const auto& v : vectors) {
    auto it = by_id.find(v.repo_id);
    if (it == by_id.end())
      throw ValidationError("build_matrix: no timeline for repo " + v.repo_id);
    const auto [duration, event] = observed_duration(*it->second, observation_end);
    if (!(duration > 0))
      throw ValidationError("build_matrix: non-positive duration for repo " + v.repo_id);
    m.repo_ids.push_back(v.repo_id);
    m.as_of.push_back(v.as_of);
    m.rows.push_back(flatten(v));
    m.duration_months.push_back(duration);
    m.event.push_back(event ? 1 : 0);
  }
  return m;
}

void write_matrix_csv(const FeatureMatrix& m, std::ostream& out) {
  out << "repo_id,as_of";
  for (const auto& name : m.column_names) out << ',' << name;
  out << ",duration_months,event\n";
  for (std::size_t i = 0; i < m.rows.size(); ++i) {
    out << m.repo_ids[i] << ',' << m.as_of[i].str();
    for (double v : m.rows[i]) {
      out << ',';
      if (!std::isnan(v)) out << fmt_num(v);
    }
    out << ',' << fmt_num(m.duration_months[i]) << ',' << int(m.event[i]) << '\n';
  }
}

FeatureMatrix read_matrix_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("feature csv: empty file");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 5 || header[0] != "repo_id" || header[1] != "as_of" ||
      header[header.size() - 2] != "duration_months" || header.back() != "event")
    throw ValidationError("feature csv: unexpected header layout");

  FeatureMatrix m;
  m.column_names.assign(header.begin() + 2, header.end() - 2);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    while (cells.size() < header.size()) cells.push_back("");  // trailing empties
    if (cells.size() != header.size())
      throw ValidationError("feature csv: wrong column count at line " + std::to_string(line_no));
    m.repo_ids.push_back(cells[0]);
    m.as_of.push_back(parse_year_month(cells[1]));
    std::vector<double> row;
    for (std::size_t c = 2; c + 2 < cells.size(); ++c)
      row.push_back(cells[c].empty() ? kNaN : std::stod(cells[c]));
    m.rows.push_back(std::move(row));
    m.duration_months.push_back(std::stod(cells[cells.size() - 2]));
    m.event.push_back(static_cast<std::uint8_t>(std::stoi(cells.back()) != 0));
  }
  return m;
}

}  // namespace features
}  // namespace vitality
