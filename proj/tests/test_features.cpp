#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "vitality/features.hpp"
#include "vitality/pipeline.hpp"
#include "vitality/synth.hpp"

using namespace vitality;
using namespace vitality::features;

namespace {

struct RepoBuilder {
  RepoTimeline t;
  RepoBuilder(const std::string& id, const std::string& created) {
    t.repo_id = id;
    t.created_at = parse_instant(created);
    t.label.repo_id = id;
  }
  RepoBuilder& add(const std::string& user, EventKind kind, const std::string& ts,
                   std::uint64_t loc = 0, std::optional<std::string> thread = std::nullopt,
                   std::optional<std::string> title = std::nullopt) {
    t.events.push_back({t.repo_id, user, kind, parse_instant(ts), loc, std::move(thread),
                        std::move(title)});
    return *this;
  }
  RepoTimeline done(YearMonth obs_end = {2019, 12}) {
    std::sort(t.events.begin(), t.events.end(), EventOrder{});
    if (!t.events.empty() && t.events.front().timestamp < t.created_at)
      t.created_at = t.events.front().timestamp;
    t.rebuild_months(obs_end);
    return t;
  }
};

}  // namespace

TEST_CASE("maintainers are exactly the users with commits or merges") {
  const auto t = RepoBuilder("r", "2015-01-01")
                     .add("a", EventKind::Commit, "2015-01-02", 10)
                     .add("b", EventKind::Star, "2015-01-03")
                     .add("c", EventKind::PrMerge, "2015-02-10", 0, std::string("pr1"))
                     .add("d", EventKind::PrOpen, "2015-02-01", 0, std::string("pr1"))
                     .done();
  const auto m = identify_maintainers(t, {2015, 12});
  CHECK(m.members == std::set<std::string>{"a", "c"});
  CHECK(identify_maintainers(t, {2015, 1}).members == std::set<std::string>{"a"});

  const auto star_only =
      RepoBuilder("s", "2015-01-01").add("b", EventKind::Star, "2015-01-03").done();
  CHECK(identify_maintainers(star_only, {2015, 12}).members.empty());
}

TEST_CASE("maintainer inactivity counts months since the last maintainer touch") {
  const auto t = RepoBuilder("r", "2015-01-01")
                     .add("a", EventKind::Commit, "2015-01-02", 10)
                     .add("a", EventKind::IssueComment, "2015-05-20", 0, std::string("i1"))
                     .add("b", EventKind::Commit, "2015-03-10", 5)
                     .add("z", EventKind::Star, "2015-12-01")
                     .done();
  const auto m = identify_maintainers(t, {2015, 12});

  SUBCASE("maintainer acted this month -> 0") {
    CHECK(maintainer_inactivity(t, m, {2015, 5}).months == 0);
  }
  SUBCASE("latest action 7 months back") {
    CHECK(maintainer_inactivity(t, m, {2015, 12}).months == 7);
  }
  SUBCASE("two maintainers: the most recent one counts") {
    // a acted 2015-05, b acted 2015-03; at 2015-08 intervals are 3 and 5
    CHECK(maintainer_inactivity(t, m, {2015, 8}).months == 3);
  }
  SUBCASE("no maintainers falls back to repo age, flagged") {
    const auto star_only =
        RepoBuilder("s", "2015-01-01").add("b", EventKind::Star, "2015-01-03").done();
    const auto res = maintainer_inactivity(star_only, identify_maintainers(star_only, {2015, 9}),
                                           {2015, 9});
    CHECK(res.months == 8);
    CHECK(res.no_maintainers);
  }
}

TEST_CASE("inactivity never grows when a maintainer event lands at as_of") {
  auto base = RepoBuilder("r", "2015-01-01")
                  .add("a", EventKind::Commit, "2015-01-02", 10)
                  .add("a", EventKind::Commit, "2015-04-15", 10)
                  .done();
  const auto m0 = identify_maintainers(base, {2015, 10});
  const int before = maintainer_inactivity(base, m0, {2015, 10}).months;

  auto appended = RepoBuilder("r", "2015-01-01")
                      .add("a", EventKind::Commit, "2015-01-02", 10)
                      .add("a", EventKind::Commit, "2015-04-15", 10)
                      .add("a", EventKind::MetaUpdate, "2015-10-20")
                      .done();
  const auto m1 = identify_maintainers(appended, {2015, 10});
  const int after = maintainer_inactivity(appended, m1, {2015, 10}).months;
  CHECK(after <= before);
  CHECK(after == 0);
}

TEST_CASE("response latency: single thread answered in 48h") {
  const auto t = RepoBuilder("r", "2015-01-01")
                     .add("m", EventKind::Commit, "2015-01-02", 10)
                     .add("u", EventKind::IssueOpen, "2015-08-10T00:00:00Z", 0, std::string("i1"))
                     .add("m", EventKind::IssueComment, "2015-08-12T00:00:00Z", 0, std::string("i1"))
                     .done();
  const auto m = identify_maintainers(t, {2015, 12});
  const auto r = response_latency(t, m, {2015, 8});
  REQUIRE(r.avg_hours.has_value());
  CHECK(*r.avg_hours == doctest::Approx(48.0).epsilon(1e-12));
  CHECK_FALSE(r.trend_hours_per_month.has_value());  // single monthly point
  CHECK(r.unresponded_fraction == 0.0);
}

TEST_CASE("response latency trend: monthly means 10..60 give slope 10") {
  RepoBuilder b("r", "2015-01-01");
  b.add("m", EventKind::Commit, "2015-01-02", 10);
  const char* months[] = {"2015-03", "2015-04", "2015-05", "2015-06", "2015-07", "2015-08"};
  for (int i = 0; i < 6; ++i) {
    const std::string thread = "i" + std::to_string(i);
    const std::string open = std::string(months[i]) + "-01T00:00:00Z";
    const Instant opened = parse_instant(open);
    b.add("u", EventKind::IssueOpen, open, 0, thread);
    b.t.events.push_back({"r", "m", EventKind::IssueComment,
                          opened + static_cast<Instant>((i + 1) * 10 * 3600), 0, thread, {}});
  }
  const auto t = b.done();
  const auto m = identify_maintainers(t, {2015, 12});
  const auto r = response_latency(t, m, {2015, 8});
  REQUIRE(r.avg_hours.has_value());
  CHECK(*r.avg_hours == doctest::Approx(35.0).epsilon(1e-12));
  REQUIRE(r.trend_hours_per_month.has_value());
  CHECK(*r.trend_hours_per_month == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("response latency: empty window means both missing") {
  const auto t = RepoBuilder("r", "2015-01-01").add("m", EventKind::Commit, "2015-01-02", 9).done();
  const auto r = response_latency(t, identify_maintainers(t, {2015, 12}), {2015, 12});
  CHECK_FALSE(r.avg_hours.has_value());
  CHECK_FALSE(r.trend_hours_per_month.has_value());
}

TEST_CASE("unresponded threads are excluded from the mean but tracked") {
  const auto t = RepoBuilder("r", "2015-01-01")
                     .add("m", EventKind::Commit, "2015-01-02", 10)
                     .add("u", EventKind::IssueOpen, "2015-08-10T00:00:00Z", 0, std::string("i1"))
                     .add("m", EventKind::IssueComment, "2015-08-10T12:00:00Z", 0, std::string("i1"))
                     .add("u", EventKind::IssueOpen, "2015-08-20T00:00:00Z", 0, std::string("i2"))
                     .done();
  const auto r = response_latency(t, identify_maintainers(t, {2015, 12}), {2015, 8});
  CHECK(*r.avg_hours == doctest::Approx(12.0));
  CHECK(r.unresponded_fraction == doctest::Approx(0.5));
}

TEST_CASE("contribution structure: ratio, imbalance, diversity") {
  SUBCASE("p=0.5 zeroes the balance index") {
    // one maintainer commit + one outsider issue = 2 substantial actions
    const auto t = RepoBuilder("r", "2015-01-01")
                       .add("m", EventKind::Commit, "2015-08-02", 10)
                       .add("u", EventKind::IssueOpen, "2015-08-05", 0, std::string("i1"))
                       .done();
    const auto cs = contribution_structure(t, identify_maintainers(t, {2015, 8}), {2015, 8});
    CHECK(cs.maintainer_contrib_ratio == doctest::Approx(0.5));
    CHECK(cs.balance_index == doctest::Approx(0.0));
  }
  SUBCASE("equal activity means zero Gini, diversity one") {
    const auto t = RepoBuilder("r", "2015-01-01")
                       .add("a", EventKind::Commit, "2015-08-02", 10)
                       .add("b", EventKind::Commit, "2015-08-03", 10)
                       .add("c", EventKind::Commit, "2015-08-04", 10)
                       .done();
    const auto cs = contribution_structure(t, identify_maintainers(t, {2015, 8}), {2015, 8});
    REQUIRE(cs.contrib_diversity.has_value());
    CHECK(*cs.contrib_diversity == doctest::Approx(1.0));
  }
  SUBCASE("zero actions in window: p=0, d=0.25, diversity missing") {
    const auto t = RepoBuilder("r", "2014-01-01").add("m", EventKind::Commit, "2014-01-02", 9).done();
    const auto cs = contribution_structure(t, identify_maintainers(t, {2015, 8}), {2015, 8});
    CHECK(cs.maintainer_contrib_ratio == 0.0);
    CHECK(cs.balance_index == doctest::Approx(0.25));
    CHECK_FALSE(cs.contrib_diversity.has_value());
  }
}

TEST_CASE("gini: hand value and brute-force oracle") {
  CHECK(gini({0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-14));  // 2/(2*4*0.5)
  CHECK(gini({}) == 0.0);
  CHECK(gini({3.0}) == 0.0);
  CHECK(gini({2.0, 2.0, 2.0}) == 0.0);

  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = static_cast<int>(rng_int(rng, 1, 50));
    std::vector<double> counts;
    for (int i = 0; i < n; ++i) counts.push_back(static_cast<double>(rng_int(rng, 0, 1000)));
    const double mine = gini(counts);
    const double ref = oracles::gini_pairwise(counts);
    CHECK(mine == ref);  // integer sums: exact
    CHECK(mine >= 0.0);
    CHECK(mine <= 1.0);
  }
}

TEST_CASE("activity deviation: constant history is zero, drop is negative") {
  RepoBuilder b("r", "2015-01-01");
  for (int i = 0; i < 15; ++i) {
    const std::string m = add_months({2015, 1}, i).str();
    b.add("a", EventKind::Commit, m + "-05", 10);
    b.add("a", EventKind::Commit, m + "-15", 10);
    b.add("u", EventKind::IssueOpen, m + "-07", 0, std::string("i" + std::to_string(i)));
    b.add("c", EventKind::PrOpen, m + "-09", 0, std::string("p" + std::to_string(i)));
  }
  const auto t = b.done();
  SUBCASE("constant series") {
    const auto d = activity_deviation(t, {2016, 3});
    CHECK(d.activity_deviation == 0.0);
    REQUIRE(d.quarterly_deviation.has_value());
    CHECK(*d.quarterly_deviation == 0.0);  // degenerate sigma rule
  }
  SUBCASE("recent silence after steady history is negative") {
    const auto d = activity_deviation(t, {2016, 6});  // Apr..Jun have no events
    CHECK(d.activity_deviation < 0.0);
  }
  SUBCASE("short history has no quarterly deviation") {
    const auto d = activity_deviation(t, {2015, 8});  // 8 months old
    CHECK_FALSE(d.quarterly_deviation.has_value());
  }
}

TEST_CASE("quarterly deviation: equal previous quarters with a different last quarter") {
  // 9 steady months (3 equal quarters), then a weak final quarter: sigma of
  // the previous quarters is 0, so the deviation degenerates to 0.
  RepoBuilder b("r", "2015-01-01");
  for (int i = 0; i < 9; ++i) {
    const std::string m = add_months({2015, 1}, i).str();
    for (int c = 0; c < 10; ++c)
      b.add("a", EventKind::Commit, m + "-" + std::to_string(10 + c), 10);
  }
  for (int i = 9; i < 12; ++i) {
    const std::string m = add_months({2015, 1}, i).str();
    for (int c = 0; c < 4; ++c)
      b.add("a", EventKind::Commit, m + "-" + std::to_string(10 + c), 10);
  }
  const auto t = b.done();
  const auto d = activity_deviation(t, {2015, 12});
  REQUIRE(d.quarterly_deviation.has_value());
  CHECK(*d.quarterly_deviation == 0.0);
}

TEST_CASE("PR classification: curated whole-word keywords, bugfix wins") {
  CHECK(classify_pr("Add dark mode feature") == PrCategory::Feature);
  CHECK(classify_pr("fix crash bug on startup") == PrCategory::Bugfix);
  CHECK(classify_pr("Update README") == PrCategory::Other);
  CHECK(classify_pr("Add fix for parser") == PrCategory::Bugfix);  // both match
  CHECK(classify_pr("prefix the suffix") == PrCategory::Other);    // no whole-word hit
  CHECK(classify_pr("") == PrCategory::Other);
  // case-insensitivity property
  const char* titles[] = {"Add dark mode feature", "fix crash bug on startup", "Update README",
                          "feat: new cache", "HOTFIX for deploy"};
  for (const char* title : titles) {
    std::string upper(title);
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    CHECK(classify_pr(title) == classify_pr(upper));
  }
}

TEST_CASE("pr focus ratios over the trailing window") {
  RepoBuilder b("r", "2015-01-01");
  b.add("m", EventKind::Commit, "2015-01-02", 9);
  int n = 0;
  auto pr = [&](const std::string& title) {
    b.add("u", EventKind::PrOpen, "2015-08-0" + std::to_string(1 + n % 9), 0,
          std::string("pr" + std::to_string(n)), title);
    ++n;
  };
  for (int i = 0; i < 4; ++i) pr("Add widget " + std::to_string(i));
  pr("Fix crash");
  for (int i = 0; i < 5; ++i) pr("Update docs " + std::to_string(i));
  const auto t = b.done();

  const auto f = pr_focus(t, {2015, 8});
  CHECK(*f.feature_ratio == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(*f.bugfix_ratio == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(*f.bugfix_feature_ratio == doctest::Approx(0.25).epsilon(1e-14));

  const auto none = pr_focus(t, {2017, 8});  // no PRs in window
  CHECK_FALSE(none.feature_ratio.has_value());
  CHECK_FALSE(none.bugfix_ratio.has_value());
  CHECK_FALSE(none.bugfix_feature_ratio.has_value());
}

TEST_CASE("pr focus: all-Other window has zero ratios and missing quotient") {
  RepoBuilder b("r", "2015-01-01");
  b.add("m", EventKind::Commit, "2015-01-02", 9);
  for (int i = 0; i < 3; ++i)
    b.add("u", EventKind::PrOpen, "2015-08-1" + std::to_string(i), 0,
          std::string("pr" + std::to_string(i)), std::string("Update docs"));
  const auto f = pr_focus(b.done(), {2015, 8});
  CHECK(*f.feature_ratio == 0.0);
  CHECK(*f.bugfix_ratio == 0.0);
  CHECK_FALSE(f.bugfix_feature_ratio.has_value());
}

TEST_CASE("feature names match the canonical table exactly") {
  const auto& names = feature_names();
  CHECK(names.size() == 20);  // 6 surface + 14 beyond-surface
  const std::array<std::string, 20> expected{
      "stars", "commits", "issues", "prs", "tags", "comments",
      "weight", "weight_rank_pct", "weight_zscore",
      "latest_maintainer_activity_interval", "avg_response_time", "response_decay_trend",
      "maintainer_contrib_ratio", "contrib_diversity", "balance_index", "activity_deviation",
      "quarterly_deviation", "feature_ratio", "bugfix_ratio", "bugfix_feature_ratio"};
  CHECK(names == expected);
  CHECK(matrix_column_names().size() == 21);
  CHECK(matrix_column_names().back() == "hits_raw");
}

TEST_CASE("assemble: liveness, ranges, and the decaying inactivity signature") {
  ScenarioSpec spec;
  spec.healthy = 8;
  spec.decaying = 10;
  spec.abrupt_cease = 5;
  const auto timelines = generate_synthetic_corpus(spec, 424242);

  const YearMonth as_of{2018, 6};
  const auto snaps = pipeline::compute_influence(timelines, as_of);
  AssembleInputs in;
  in.timelines = &timelines;
  in.weighted = &snaps.weighted;
  in.normalized = &snaps.normalized;
  in.raw_hits = &snaps.raw_hits;
  const auto vectors = assemble(in, as_of);

  for (const auto& v : vectors) {
    CAPTURE(v.repo_id);
    if (v.contrib_diversity) {
      CHECK(*v.contrib_diversity >= 0.0);
      CHECK(*v.contrib_diversity <= 1.0);
    }
    CHECK(v.balance_index >= 0.0);
    CHECK(v.balance_index <= 0.25);
    CHECK(v.maintainer_contrib_ratio >= 0.0);
    CHECK(v.maintainer_contrib_ratio <= 1.0);
    if (v.feature_ratio && v.bugfix_ratio) CHECK(*v.feature_ratio + *v.bugfix_ratio <= 1.0 + 1e-12);
    CHECK(v.weight_rank_pct <= 1.0);
    CHECK(v.latest_maintainer_activity_interval >= 0.0);
  }

  // ceased-before-as_of repos are excluded
  for (const auto& t : timelines) {
    if (t.label.ceased() && ym_of(*t.label.cessation_time) < as_of) {
      const bool present = std::any_of(vectors.begin(), vectors.end(),
                                       [&](const FeatureVector& v) { return v.repo_id == t.repo_id; });
      CHECK_FALSE(present);
    }
  }

  // decaying repos: the inactivity interval grows toward cessation
  for (const auto& t : timelines) {
    if (t.repo_id.find("decaying") == std::string::npos) continue;
    const YearMonth cess = ym_of(*t.label.cessation_time);
    const YearMonth late = add_months(cess, -1), early = add_months(cess, -6);
    const auto maints_late = identify_maintainers(t, late);
    const auto maints_early = identify_maintainers(t, early);
    CAPTURE(t.repo_id);
    CHECK(maintainer_inactivity(t, maints_late, late).months >
          maintainer_inactivity(t, maints_early, early).months);
  }
}

TEST_CASE("keyword config file round-trips and validates") {
  std::istringstream good(R"({"version":1,"feature":["add"],"bugfix":["fix"]})");
  const auto kw = load_pr_keywords(good);
  CHECK(kw.version == 1);
  CHECK(classify_pr("add a thing", kw) == PrCategory::Feature);
  CHECK(classify_pr("implement a thing", kw) == PrCategory::Other);  // not in this config

  std::istringstream no_version(R"({"feature":["add"],"bugfix":["fix"]})");
  CHECK_THROWS_AS(load_pr_keywords(no_version), ValidationError);
  std::istringstream empty_list(R"({"version":1,"feature":[],"bugfix":["fix"]})");
  CHECK_THROWS_AS(load_pr_keywords(empty_list), ValidationError);
}

TEST_CASE("component z-scoring switch changes the composite but not the degenerate rule") {
  RepoBuilder b("r", "2015-01-01");
  for (int i = 0; i < 14; ++i) {
    const std::string m = add_months({2015, 1}, i).str();
    for (int c = 0; c < (i % 2 ? 3 : 1); ++c)
      b.add("a", EventKind::Commit, m + "-" + std::to_string(10 + c), 10);
    b.add("u", EventKind::IssueOpen, m + "-20", 0, std::string("i" + std::to_string(i)));
  }
  const auto t = b.done();
  const auto raw = activity_deviation(t, {2016, 2});
  const auto scaled = activity_deviation(t, {2016, 2}, {.zscore_components = true});
  CHECK(raw.activity_deviation != scaled.activity_deviation);

  RepoBuilder flat("f", "2015-01-01");
  for (int i = 0; i < 14; ++i)
    flat.add("a", EventKind::Commit, add_months({2015, 1}, i).str() + "-10", 10);
  const auto ft = flat.done();
  CHECK(activity_deviation(ft, {2016, 2}, {.zscore_components = true}).activity_deviation == 0.0);
}

TEST_CASE("matrix CSV round-trips including missing cells") {
  ScenarioSpec spec;
  spec.healthy = 4;
  spec.decaying = 4;
  const auto timelines = generate_synthetic_corpus(spec, 3333);
  const auto matrix =
      pipeline::snapshot_matrix(timelines, {2018, 6}, month_end(spec.observation_end));
  std::stringstream buf;
  write_matrix_csv(matrix, buf);
  const auto back = read_matrix_csv(buf);
  REQUIRE(back.rows.size() == matrix.rows.size());
  CHECK(back.column_names == matrix.column_names);
  for (std::size_t i = 0; i < matrix.rows.size(); ++i) {
    CHECK(back.repo_ids[i] == matrix.repo_ids[i]);
    CHECK(back.duration_months[i] == doctest::Approx(matrix.duration_months[i]).epsilon(1e-12));
    CHECK(back.event[i] == matrix.event[i]);
    for (std::size_t c = 0; c < matrix.rows[i].size(); ++c) {
      const double a = matrix.rows[i][c], b = back.rows[i][c];
      if (std::isnan(a))
        CHECK(std::isnan(b));
      else
        CHECK(b == doctest::Approx(a).epsilon(1e-12));
    }
  }
}
