#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "vitality/influence.hpp"

using namespace vitality;
using namespace vitality::influence;

namespace {

RepoEvent make_event(const std::string& repo, const std::string& user, EventKind kind,
                     Instant ts, std::uint64_t loc = 0) {
  return {repo, user, kind, ts, loc, {}, {}};
}

RepoTimeline repo_with_events(const std::string& id, std::vector<RepoEvent> events,
                              YearMonth obs_end = {2016, 12}) {
  RepoTimeline t;
  t.repo_id = id;
  t.events = std::move(events);
  std::sort(t.events.begin(), t.events.end(), EventOrder{});
  t.created_at = t.events.front().timestamp;
  t.label.repo_id = id;
  t.rebuild_months(obs_end);
  return t;
}

const Instant kT0 = parse_instant("2015-06-01T00:00:00Z");

// Dense-matrix mirror of run_hits built on Eigen, for cross-checking.
InfluenceState eigen_hits(const std::vector<EdgeWeight>& edges, double tol, int max_iter) {
  std::map<std::string, int> repo_ix, user_ix;
  for (const auto& e : edges) {
    repo_ix.try_emplace(e.repo_id, static_cast<int>(repo_ix.size()));
    user_ix.try_emplace(e.user_id, static_cast<int>(user_ix.size()));
  }
  const int nr = static_cast<int>(repo_ix.size());
  const int nu = static_cast<int>(user_ix.size());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(nr, nu);
  for (const auto& e : edges) w(repo_ix.at(e.repo_id), user_ix.at(e.user_id)) += e.total();

  Eigen::VectorXd p = Eigen::VectorXd::Ones(nr), u = Eigen::VectorXd::Ones(nu);
  auto normalize = [](Eigen::VectorXd& v) {
    const double s = v.sum();
    if (s <= 0)
      v.setConstant(1.0 / static_cast<double>(v.size()));
    else
      v /= s;
  };
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd p2 = w * u;
    normalize(p2);
    Eigen::VectorXd u2 = w.transpose() * p2;
    normalize(u2);
    const double delta = std::max((p2 - p).cwiseAbs().maxCoeff(),
                                  (u2 - u).cwiseAbs().maxCoeff());
    p = p2;
    u = u2;
    if (delta < tol) break;
  }
  InfluenceState s;
  for (const auto& [repo, ix] : repo_ix) s.pqs[repo] = p(ix);
  for (const auto& [user, ix] : user_ix) s.uis[user] = u(ix);
  return s;
}

}  // namespace

TEST_CASE("decay factor follows 1/(1 + k/N)") {
  CHECK(decay_factor({5, 5}) == 0.5);                          // k = N boundary
  CHECK(decay_factor({1, 4}) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(decay_factor({1, 1000000000}) > 0.999999);             // k=1, huge N -> 1-
  CHECK(decay_factor({1, 1000000000}) < 1.0);
  CHECK_THROWS_AS(decay_factor({0, 3}), std::invalid_argument);
  CHECK_THROWS_AS(decay_factor({4, 3}), std::invalid_argument);
}

TEST_CASE("decay factor strictly decreases in k for fixed N") {
  for (std::uint64_t n : {2ull, 7ull, 100ull}) {
    double prev = 1.0;
    for (std::uint64_t k = 1; k <= n; ++k) {
      const double d = decay_factor({k, n});
      CHECK(d < prev);
      CHECK(d >= 0.5);
      prev = d;
    }
  }
}

TEST_CASE("commit weight is 8*log10(LOC)*decay with a zero-LOC cutoff") {
  CHECK(commit_weight(0, 0.9) == 0.0);
  CHECK(commit_weight(1, 0.9) == 0.0);  // log10(1) = 0
  CHECK(commit_weight(100, 0.8) == doctest::Approx(12.8).epsilon(1e-14));
  CHECK_THROWS_AS(commit_weight(10, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(commit_weight(10, 1.5), std::invalid_argument);
}

TEST_CASE("single star as the repo's only action weighs 0.5") {
  const auto t = repo_with_events("r1", {make_event("r1", "u1", EventKind::Star, kT0)});
  const auto edges = build_edges({t}, {2015, 6});
  REQUIRE(edges.size() == 1);
  CHECK(edges[0].total() == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("two issues at ordinals 1,2 of a 4-action repo") {
  // user files two issues first; two later stars by others complete N_p = 4
  const auto t = repo_with_events(
      "r1", {make_event("r1", "u1", EventKind::IssueOpen, kT0),
             make_event("r1", "u1", EventKind::IssueOpen, kT0 + 100),
             make_event("r1", "u2", EventKind::Star, kT0 + 200),
             make_event("r1", "u3", EventKind::Star, kT0 + 300)});
  const auto edges = build_edges({t}, {2015, 6});
  REQUIRE(edges.size() == 3);
  const auto u1 = std::find_if(edges.begin(), edges.end(),
                               [](const EdgeWeight& e) { return e.user_id == "u1"; });
  REQUIRE(u1 != edges.end());
  const double expected = 2.0 / 1.25 + 2.0 / 1.5;  // 2.9333...
  CHECK(u1->w_issue == doctest::Approx(expected).epsilon(1e-14));
  CHECK(u1->total() == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("no interactions at or before as_of yields no edges") {
  const auto t = repo_with_events("r1", {make_event("r1", "u1", EventKind::Star, kT0)});
  CHECK(build_edges({t}, {2015, 5}).empty());
}

TEST_CASE("zero-weight pairs are retained") {
  const auto t = repo_with_events("r1", {make_event("r1", "u1", EventKind::Commit, kT0, 1)});
  const auto edges = build_edges({t}, {2015, 6});
  REQUIRE(edges.size() == 1);
  CHECK(edges[0].total() == 0.0);
}

TEST_CASE("repeat stars collapse to the first occurrence") {
  const auto t = repo_with_events(
      "r1", {make_event("r1", "u1", EventKind::Star, kT0),
             make_event("r1", "u1", EventKind::Star, kT0 + 1000)});
  const auto edges = build_edges({t}, {2015, 6});
  REQUIRE(edges.size() == 1);
  // first star at ordinal 1 of 2 actions: 1/(1+1/2) = 2/3
  CHECK(edges[0].w_star == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("PR opens carry the issue weight class") {
  const auto t = repo_with_events(
      "r1", {{"r1", "u1", EventKind::PrOpen, kT0, 0, std::string("th1"), std::string("Add x")}});
  const auto edges = build_edges({t}, {2015, 6});
  REQUIRE(edges.size() == 1);
  CHECK(edges[0].w_issue == doctest::Approx(2.0 * 0.5).epsilon(1e-14));
}

TEST_CASE("hits: single user and repo converge to unity scores") {
  std::vector<EdgeWeight> edges{{"u1", "r1", 1, 0, 0, 0}};
  const auto s = run_hits(edges, {2015, 6});
  CHECK(s.converged);
  CHECK(s.pqs.at("r1") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.uis.at("u1") == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hits: one user, two repos with weights 1 and 3") {
  std::vector<EdgeWeight> edges{{"u1", "r1", 1, 0, 0, 0}, {"u1", "r2", 3, 0, 0, 0}};
  const auto s = run_hits(edges, {2015, 6});
  CHECK(s.converged);
  CHECK(s.pqs.at("r1") == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(s.pqs.at("r2") == doctest::Approx(0.75).epsilon(1e-9));
}

TEST_CASE("hits: symmetric graphs give symmetric scores") {
  std::vector<EdgeWeight> edges{{"u1", "r1", 2, 0, 0, 0},
                                {"u1", "r2", 2, 0, 0, 0},
                                {"u2", "r1", 0, 5, 0, 0},
                                {"u2", "r2", 0, 5, 0, 0}};
  const auto s = run_hits(edges, {2015, 6});
  CHECK(s.pqs.at("r1") == doctest::Approx(s.pqs.at("r2")).epsilon(1e-12));
}

TEST_CASE("hits: empty graph and all-zero weights degenerate safely") {
  const auto empty = run_hits({}, {2015, 6});
  CHECK(empty.converged);
  CHECK(empty.iterations == 0);
  CHECK(empty.pqs.empty());
  CHECK(empty.uis.empty());

  std::vector<EdgeWeight> zero{{"u1", "r1", 0, 0, 0, 0}, {"u2", "r2", 0, 0, 0, 0}};
  const auto s = run_hits(zero, {2015, 6});
  CHECK(s.pqs.at("r1") == doctest::Approx(0.5));
  CHECK(s.pqs.at("r2") == doctest::Approx(0.5));
}

TEST_CASE("hits: score mass is conserved and scaling cancels") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 50; ++trial) {
    const int nr = static_cast<int>(rng_int(rng, 1, 6));
    const int nu = static_cast<int>(rng_int(rng, 1, 6));
    std::vector<EdgeWeight> edges;
    for (int r = 0; r < nr; ++r)
      for (int u = 0; u < nu; ++u)
        if (rng_unit(rng) < 0.6)
          edges.push_back({"u" + std::to_string(u), "r" + std::to_string(r),
                           rng_range(rng, 0.0, 5.0), 0, 0, 0});
    if (edges.empty()) continue;
    const auto s = run_hits(edges, {2015, 6});
    double sum_p = 0, sum_u = 0;
    for (const auto& [k, v] : s.pqs) sum_p += v;
    for (const auto& [k, v] : s.uis) sum_u += v;
    CHECK(sum_p == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(sum_u == doctest::Approx(1.0).epsilon(1e-9));

    auto scaled = edges;
    for (auto& e : scaled) e.w_star *= 7.25;
    const auto s2 = run_hits(scaled, {2015, 6});
    for (const auto& [repo, v] : s.pqs)
      CHECK(s2.pqs.at(repo) == doctest::Approx(v).epsilon(1e-7));
  }
}

TEST_CASE("hits matches the dense Eigen oracle on small graphs") {
  std::mt19937_64 rng(987);
  HitsOptions opts;
  opts.tol = 1e-12;
  opts.max_iter = 2000;
  for (int trial = 0; trial < 200; ++trial) {
    const int nr = static_cast<int>(rng_int(rng, 1, 2));
    const int nu = static_cast<int>(rng_int(rng, 1, 4 - nr));
    std::vector<EdgeWeight> edges;
    for (int r = 0; r < nr; ++r)
      for (int u = 0; u < nu; ++u)
        if (rng_unit(rng) < 0.7)
          edges.push_back({"u" + std::to_string(u), "r" + std::to_string(r),
                           rng_range(rng, 0.05, 10.0), 0, 0, 0});
    if (edges.empty()) continue;
    const auto mine = run_hits(edges, {2015, 6}, opts);
    const auto ref = eigen_hits(edges, 1e-12, 2000);
    for (const auto& [repo, v] : ref.pqs)
      CHECK(mine.pqs.at(repo) == doctest::Approx(v).epsilon(1e-6));
    for (const auto& [user, v] : ref.uis)
      CHECK(mine.uis.at(user) == doctest::Approx(v).epsilon(1e-6));
  }
}

TEST_CASE("weight feature exposes snapshot PQS with a zero default") {
  std::vector<EdgeWeight> edges{{"u1", "r1", 1, 0, 0, 0}, {"u1", "r2", 3, 0, 0, 0}};
  const auto s = run_hits(edges, {2015, 6});
  const auto w = weight_feature(edges, s);
  CHECK(w.at("r2") == doctest::Approx(0.75).epsilon(1e-9));

  std::vector<EdgeWeight> other{{"u9", "r9", 4, 0, 0, 0}};
  const auto w2 = weight_feature(other, s);  // r9 absent from the snapshot
  CHECK(w2.at("r9") == 0.0);
}

TEST_CASE("weight feature: uniform star-only graph splits evenly") {
  std::vector<EdgeWeight> edges{{"u1", "r1", 0.5, 0, 0, 0},
                                {"u2", "r2", 0.5, 0, 0, 0},
                                {"u3", "r3", 0.5, 0, 0, 0}};
  const auto s = run_hits(edges, {2015, 6});
  const auto w = weight_feature(edges, s);
  for (const auto& [repo, v] : w) CHECK(v == doctest::Approx(1.0 / 3).epsilon(1e-9));
}

TEST_CASE("advancing the window never shrinks an edge") {
  // new events add contributions and raise N_p, which only lifts existing
  // decay factors, so per-pair totals grow monotonically month over month
  std::vector<RepoEvent> events;
  std::mt19937_64 rng(64);
  const Instant base = parse_instant("2015-01-01T00:00:00Z");
  const char* users[] = {"u1", "u2", "u3"};
  const EventKind kinds[] = {EventKind::Star, EventKind::Commit, EventKind::Fork,
                             EventKind::IssueOpen};
  for (int i = 0; i < 120; ++i) {
    const EventKind k = kinds[rng_int(rng, 0, 3)];
    events.push_back({"r", users[rng_int(rng, 0, 2)], k,
                      base + rng_int(rng, 0, 500) * kSecondsPerDay,
                      k == EventKind::Commit ? static_cast<std::uint64_t>(rng_int(rng, 0, 400))
                                             : 0,
                      {},
                      {}});
  }
  RepoTimeline t;
  t.repo_id = "r";
  t.events = std::move(events);
  std::sort(t.events.begin(), t.events.end(), EventOrder{});
  t.created_at = t.events.front().timestamp;
  t.rebuild_months({2016, 12});

  std::map<std::string, double> prev;
  for (YearMonth m{2015, 1}; m <= YearMonth{2016, 6}; m = add_months(m, 1)) {
    std::map<std::string, double> now;
    for (const auto& e : build_edges({t}, m)) {
      CHECK(e.w_star >= 0);
      CHECK(e.w_commit >= 0);
      CHECK(e.w_fork >= 0);
      CHECK(e.w_issue >= 0);
      now[e.user_id] = e.total();
    }
    for (const auto& [user, w] : prev) {
      CAPTURE(user);
      CHECK(now[user] >= w - 1e-12);
    }
    prev = std::move(now);
  }
}

TEST_CASE("normalize: percentile ranks with average-rank ties") {
  const auto out = normalize({{"a", 1.0}, {"b", 2.0}, {"c", 3.0}, {"d", 4.0}});
  CHECK(out.at("a").pct_rank == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(out.at("b").pct_rank == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(out.at("c").pct_rank == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(out.at("d").pct_rank == doctest::Approx(1.0).epsilon(1e-14));

  const auto tied = normalize({{"a", 5.0}, {"b", 5.0}, {"c", 9.0}});
  CHECK(tied.at("a").pct_rank == doctest::Approx(0.5).epsilon(1e-14));  // (1+2)/2 / 3
  CHECK(tied.at("b").pct_rank == tied.at("a").pct_rank);
  CHECK(tied.at("c").pct_rank == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("normalize: log z-scores with degenerate and zero handling") {
  const double e1 = std::exp(1.0), e3 = std::exp(3.0);
  const auto out = normalize({{"a", e1}, {"b", e3}});
  CHECK(out.at("a").zscore == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(out.at("b").zscore == doctest::Approx(1.0).epsilon(1e-12));

  const auto equal = normalize({{"a", 4.0}, {"b", 4.0}, {"c", 4.0}});
  for (const auto& [k, w] : equal) CHECK(w.zscore == 0.0);

  const auto with_zero = normalize({{"a", 0.0}, {"b", e1}, {"c", e3}});
  CHECK(with_zero.at("a").zscore == doctest::Approx(-1.0).epsilon(1e-12));  // window minimum

  CHECK_THROWS_AS(normalize({}), ValidationError);
}

TEST_CASE("snapshot CSV has the pinned schema") {
  std::vector<EdgeWeight> edges{{"u1", "r1", 1, 0, 0, 0}};
  const auto s = run_hits(edges, {2018, 6});
  const auto norm = normalize(weight_feature(edges, s));
  std::ostringstream out;
  write_snapshot_csv(s, norm, out);
  std::istringstream lines(out.str());
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == "month,repo_id,weight,weight_rank_pct,weight_zscore");
  CHECK(row == "2018-06,r1,1,1,0");
}
