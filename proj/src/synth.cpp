#include "vitality/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace vitality {

namespace {

using Rng = std::mt19937_64;

const std::vector<std::string>& feature_titles() {
  static const std::vector<std::string> t{
      "Add dark mode support",      "Implement streaming API",   "feat: incremental cache",
      "Introduce plugin loader",    "Add retry support",         "Implement bulk export",
  };
  return t;
}
const std::vector<std::string>& bugfix_titles() {
  static const std::vector<std::string> t{
      "Fix crash on startup",       "fix: handle empty config",  "Patch memory leak",
      "Resolve deadlock in worker", "Hotfix for broken build",   "Fix bug in date parsing",
  };
  return t;
}
const std::vector<std::string>& other_titles() {
  static const std::vector<std::string> t{
      "Update README",              "Refactor internals",        "Bump dependencies",
      "Cleanup CI workflow",        "Improve docs wording",      "Rename internal modules",
  };
  return t;
}

std::string pad3(int v) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", v);
  return buf;
}

struct Builder {
  const ScenarioSpec& spec;
  RepoTimeline repo;
  Rng rng;
  Instant hard_stop;  // no event at or beyond this instant
  int thread_seq = 0;

  Builder(const ScenarioSpec& s, std::string repo_id, std::uint64_t repo_seed)
      : spec(s), rng(repo_seed) {
    repo.repo_id = std::move(repo_id);
    hard_stop = month_end(s.observation_end) + 1;
  }

  void emit(const std::string& user, EventKind kind, Instant at, std::uint64_t loc = 0,
            std::optional<std::string> thread = std::nullopt,
            std::optional<std::string> title = std::nullopt) {
    if (at >= hard_stop) return;
    repo.events.push_back(RepoEvent{repo.repo_id, user, kind, at, loc, std::move(thread),
                                    std::move(title)});
  }

  Instant at(YearMonth m, int day, int hour, int minute = 0) {
    return month_start(m) + (day - 1) * kSecondsPerDay + hour * 3600 + minute * 60;
  }

  Instant rand_time(YearMonth m, int day_lo, int day_hi) {
    return at(m, static_cast<int>(rng_int(rng, day_lo, day_hi)),
              static_cast<int>(rng_int(rng, 0, 23)), static_cast<int>(rng_int(rng, 0, 59)));
  }

  std::string next_thread(const char* prefix) {
    return repo.repo_id + "/" + prefix + "-" + std::to_string(thread_seq++);
  }

  std::string fresh_user(const char* tag, int salt) {
    return tag + std::to_string(salt) + "@" + repo.repo_id;
  }
};

std::string hub_user(int i) { return "hub-user-" + pad3(i); }

const std::string& pick(const std::vector<std::string>& pool, Rng& rng) {
  return pool[static_cast<std::size_t>(rng_int(rng, 0, static_cast<std::int64_t>(pool.size()) - 1))];
}

// Opens an issue or PR and schedules the first maintainer touch. A response
// landing at or after `response_cutoff` is dropped (maintainers are gone).
void open_thread(Builder& b, const std::string& opener, bool is_pr, YearMonth m,
                 const std::string& maintainer, double answer_prob, double latency_lo_h,
                 double latency_hi_h, Instant response_cutoff, const std::string& title,
                 bool merge_if_pr) {
  const std::string thread = b.next_thread(is_pr ? "pr" : "issue");
  const Instant opened = b.rand_time(m, 1, 20);
  b.emit(opener, is_pr ? EventKind::PrOpen : EventKind::IssueOpen, opened, 0, thread, title);
  if (rng_unit(b.rng) >= answer_prob) return;
  const double latency_h = rng_range(b.rng, latency_lo_h, latency_hi_h);
  const Instant responded = opened + static_cast<Instant>(latency_h * 3600.0);
  if (responded >= response_cutoff) return;
  b.emit(maintainer, is_pr ? EventKind::PrComment : EventKind::IssueComment, responded, 0, thread);
  if (is_pr && merge_if_pr) {
    const Instant merged = responded + static_cast<Instant>(rng_range(b.rng, 1.0, 24.0) * 3600.0);
    if (merged < response_cutoff) b.emit(maintainer, EventKind::PrMerge, merged, 0, thread);
  }
}

std::uint64_t commit_loc(Rng& rng, double scale) {
  const double loc = std::exp(rng_range(rng, std::log(20.0), std::log(600.0))) * scale;
  return static_cast<std::uint64_t>(std::max(1.0, std::round(loc)));
}

// One month of steady activity shared by the Healthy archetype and the
// steady phases of Decaying/AbruptCease.
struct SteadyParams {
  int base_commits = 6;
  int n_maintainers = 3;
  int n_contributors = 4;
  double hub_prob = 0.3;  // chance an engaging outsider is a hub user
  double feature_share = 0.6;
  double bugfix_share = 0.25;
};

void steady_month(Builder& b, YearMonth m, const SteadyParams& p, Instant response_cutoff,
                  double activity_scale, double latency_lo, double latency_hi,
                  double answer_prob, double bugfix_share_override = -1) {
  auto maintainer = [&](int i) { return "maint-" + std::to_string(i) + "@" + b.repo.repo_id; };
  auto contributor = [&](int i) { return "contrib-" + std::to_string(i) + "@" + b.repo.repo_id; };

  const int commits = std::max(
      0, static_cast<int>(std::round(
             activity_scale * static_cast<double>(p.base_commits + rng_int(b.rng, -2, 2)))));
  for (int i = 0; i < commits; ++i) {
    const bool by_maint = rng_unit(b.rng) < 0.75;
    const std::string who = by_maint ? maintainer(static_cast<int>(rng_int(b.rng, 0, p.n_maintainers - 1)))
                                     : contributor(static_cast<int>(rng_int(b.rng, 0, p.n_contributors - 1)));
    b.emit(who, EventKind::Commit, b.rand_time(m, 1, 28), commit_loc(b.rng, activity_scale));
  }

  const int issues = std::max(0, static_cast<int>(std::round(activity_scale * static_cast<double>(rng_int(b.rng, 1, 3)))));
  for (int i = 0; i < issues; ++i) {
    const double r = rng_unit(b.rng);
    std::string opener;
    if (r < p.hub_prob) {
      opener = hub_user(static_cast<int>(rng_int(b.rng, 0, 19)));
    } else if (r < p.hub_prob + 0.4) {
      opener = contributor(static_cast<int>(rng_int(b.rng, 0, p.n_contributors - 1)));
    } else {
      opener = b.fresh_user("reporter-", m.index() * 8 + i);
    }
    open_thread(b, opener, false, m, maintainer(0), answer_prob, latency_lo, latency_hi,
                response_cutoff, pick(other_titles(), b.rng), false);
  }

  const double bugfix_share = bugfix_share_override >= 0 ? bugfix_share_override : p.bugfix_share;
  const int prs = std::max(0, static_cast<int>(std::round(activity_scale * static_cast<double>(rng_int(b.rng, 1, 3)))));
  for (int i = 0; i < prs; ++i) {
    const double r = rng_unit(b.rng);
    std::string title;
    if (r < bugfix_share) {
      title = pick(bugfix_titles(), b.rng);
    } else if (r < bugfix_share + p.feature_share) {
      title = pick(feature_titles(), b.rng);
    } else {
      title = pick(other_titles(), b.rng);
    }
    open_thread(b, contributor(static_cast<int>(rng_int(b.rng, 0, p.n_contributors - 1))), true, m,
                maintainer(1 % p.n_maintainers), answer_prob, latency_lo, latency_hi,
                response_cutoff, title, rng_unit(b.rng) < 0.85);
  }

  const int stars = std::max(0, static_cast<int>(std::round(activity_scale * static_cast<double>(rng_int(b.rng, 1, 4)))));
  for (int i = 0; i < stars; ++i) {
    const std::string who = rng_unit(b.rng) < p.hub_prob
                                ? hub_user(static_cast<int>(rng_int(b.rng, 0, 19)))
                                : b.fresh_user("stargazer-", m.index() * 16 + i);
    b.emit(who, EventKind::Star, b.rand_time(m, 1, 28));
  }
  if (rng_unit(b.rng) < 0.4 * activity_scale) {
    const std::string who = rng_unit(b.rng) < p.hub_prob
                                ? hub_user(static_cast<int>(rng_int(b.rng, 0, 19)))
                                : b.fresh_user("forker-", m.index());
    b.emit(who, EventKind::Fork, b.rand_time(m, 1, 28));
  }
  if (rng_unit(b.rng) < 0.3 * activity_scale)
    b.emit(maintainer(0), EventKind::TagPush, b.rand_time(m, 20, 28));
  if (rng_unit(b.rng) < 0.12)
    b.emit(maintainer(0), EventKind::MetaUpdate, b.rand_time(m, 1, 28));
}

void launch_burst(Builder& b, YearMonth created, int n_stars) {
  b.emit("maint-0@" + b.repo.repo_id, EventKind::MetaUpdate, month_start(created));
  for (int i = 0; i < n_stars; ++i)
    b.emit(b.fresh_user("early-", i), EventKind::Star, b.rand_time(created, 1, 27));
}

void set_ceased(Builder& b, YearMonth cess_month) {
  CessationLabel l;
  l.repo_id = b.repo.repo_id;
  l.status = CessationStatus::Ceased;
  l.cessation_time = b.at(cess_month, static_cast<int>(rng_int(b.rng, 3, 25)),
                          static_cast<int>(rng_int(b.rng, 0, 23)));
  l.source = rng_unit(b.rng) < 0.6 ? CessationSource::Archived : CessationSource::DeclaredInDocs;
  b.repo.label = l;
}

// Cessation month: near cluster within (focus, focus+near_window], otherwise
// a far tail that stays invisible at the focus snapshot.
YearMonth draw_cessation(Builder& b, bool& near) {
  near = rng_unit(b.rng) < b.spec.near_fraction;
  const YearMonth focus = b.spec.cessation_focus;
  if (near) return add_months(focus, static_cast<int>(rng_int(b.rng, 1, b.spec.near_window)));
  return add_months(focus, static_cast<int>(rng_int(b.rng, b.spec.near_window + 2,
                                                    std::max(b.spec.near_window + 2, b.spec.far_window))));
}

void gen_healthy(Builder& b, bool quiet) {
  const int span = months_between(b.spec.creation_from, b.spec.creation_to);
  const YearMonth created = add_months(b.spec.creation_from,
                                       static_cast<int>(rng_int(b.rng, 0, std::max(0, span))));
  launch_burst(b, created, static_cast<int>(rng_int(b.rng, quiet ? 5 : 8, quiet ? 9 : 15)));
  SteadyParams p;
  if (quiet) {
    p.base_commits = static_cast<int>(rng_int(b.rng, 1, 2));
    p.n_maintainers = static_cast<int>(rng_int(b.rng, 1, 2));
    p.n_contributors = 2;
    p.hub_prob = 0.2;
  } else {
    p.base_commits = static_cast<int>(rng_int(b.rng, 5, 10));
    p.n_maintainers = static_cast<int>(rng_int(b.rng, 2, 4));
    p.n_contributors = static_cast<int>(rng_int(b.rng, 3, 6));
  }
  for (YearMonth m = created; m <= b.spec.observation_end; m = add_months(m, 1)) {
    if (quiet) {
      // Sparse but responsibly maintained: one or two commits, prompt answers.
      const std::string maint = "maint-0@" + b.repo.repo_id;
      const int commits = static_cast<int>(rng_int(b.rng, 1, p.base_commits));
      for (int i = 0; i < commits; ++i)
        b.emit(maint, EventKind::Commit, b.rand_time(m, 1, 28), commit_loc(b.rng, 0.6));
      if (rng_unit(b.rng) < 0.5)
        open_thread(b, b.fresh_user("reporter-", m.index()), false, m, maint, 0.98, 1, 24,
                    b.hard_stop, pick(other_titles(), b.rng), false);
      if (rng_unit(b.rng) < 0.3)
        open_thread(b, b.fresh_user("contrib-", m.index()), true, m, maint, 0.95, 2, 36,
                    b.hard_stop, pick(bugfix_titles(), b.rng), true);
      const int stars = static_cast<int>(rng_int(b.rng, 0, 2));
      for (int i = 0; i < stars; ++i)
        b.emit(b.fresh_user("stargazer-", m.index() * 4 + i), EventKind::Star,
               b.rand_time(m, 1, 28));
    } else {
      steady_month(b, m, p, b.hard_stop, 1.0, 2, 36, 0.95);
    }
  }
}

void gen_decaying(Builder& b) {
  bool near = false;
  const YearMonth cess = draw_cessation(b, near);
  const int offset = months_between(b.spec.cessation_focus, cess);
  int decay_len;
  if (near) {
    // Deep enough into the decline at the focus snapshot to be visible.
    decay_len = std::max(7, offset + 5 + static_cast<int>(rng_int(b.rng, 0, 3)));
  } else {
    // Far cessation: the decline starts after the focus snapshot.
    decay_len = std::min(offset, 7 + static_cast<int>(rng_int(b.rng, 0, 1)));
  }
  const YearMonth decay_start = add_months(cess, -decay_len);
  YearMonth created = add_months(decay_start, -static_cast<int>(rng_int(b.rng, 12, 34)));
  if (created < b.spec.creation_from) created = b.spec.creation_from;

  launch_burst(b, created, static_cast<int>(rng_int(b.rng, 8, 15)));
  SteadyParams p;
  p.base_commits = static_cast<int>(rng_int(b.rng, 10, 16));
  p.n_maintainers = static_cast<int>(rng_int(b.rng, 2, 3));
  p.n_contributors = static_cast<int>(rng_int(b.rng, 3, 5));

  // Commit schedule across the decay window: geometric decline, strictly
  // decreasing into a single fully quiet month right before cessation.
  const double ratio = rng_range(b.rng, 0.6, 0.78);
  std::vector<int> commits(static_cast<std::size_t>(decay_len));
  for (int d = 0; d < decay_len; ++d)
    commits[static_cast<std::size_t>(d)] = static_cast<int>(
        std::round(static_cast<double>(p.base_commits) * std::pow(ratio, d + 1)));
  commits.back() = 0;
  for (int d = decay_len - 2; d >= 0; --d)
    commits[static_cast<std::size_t>(d)] =
        std::max(commits[static_cast<std::size_t>(d)], commits[static_cast<std::size_t>(d + 1)] + 1);

  const Instant quiet_start = month_start(add_months(cess, -1));
  const double latency_growth = rng_range(b.rng, 1.35, 1.6);

  for (YearMonth m = created; m < cess; m = add_months(m, 1)) {
    const int d = months_between(decay_start, m);
    if (d < 0) {
      steady_month(b, m, p, quiet_start, 1.0, 4, 48, 0.95);
      continue;
    }
    const std::string maint = "maint-0@" + b.repo.repo_id;
    const int n_commits = commits[static_cast<std::size_t>(d)];
    const double scale = std::pow(ratio, d + 1);
    for (int i = 0; i < n_commits; ++i) {
      const std::string who = rng_unit(b.rng) < 0.8
                                  ? maint
                                  : "contrib-0@" + b.repo.repo_id;
      b.emit(who, EventKind::Commit, b.rand_time(m, 1, 28),
             commit_loc(b.rng, std::max(0.05, scale)));
    }
    if (n_commits == 0) {
      // The final quiet month: maintainers are gone; a stray late star at most.
      if (rng_unit(b.rng) < 0.3)
        b.emit(b.fresh_user("stargazer-", m.index()), EventKind::Star, b.rand_time(m, 1, 28));
      continue;
    }
    const double lat_lo = 24.0 * std::pow(latency_growth, d);
    const double lat_hi = lat_lo * 2.5;
    const double answer = std::max(0.2, 0.9 - 0.08 * d);
    if (rng_unit(b.rng) < std::min(1.0, 2.0 * scale + 0.2))
      open_thread(b, b.fresh_user("reporter-", m.index()), false, m, maint, answer,
                  std::min(lat_lo, 900.0), std::min(lat_hi, 1200.0), quiet_start,
                  pick(other_titles(), b.rng), false);
    if (rng_unit(b.rng) < std::min(1.0, 1.6 * scale + 0.1))
      open_thread(b, "contrib-0@" + b.repo.repo_id, true, m, maint, answer,
                  std::min(lat_lo, 900.0), std::min(lat_hi, 1200.0), quiet_start,
                  rng_unit(b.rng) < 0.75 ? pick(bugfix_titles(), b.rng)
                                         : pick(feature_titles(), b.rng),
                  rng_unit(b.rng) < 0.5);
    const int late_stars = static_cast<int>(rng_int(b.rng, 0, d < 4 ? 2 : 1));
    for (int i = 0; i < late_stars; ++i)
      b.emit(b.fresh_user("stargazer-", m.index() * 4 + i), EventKind::Star,
             b.rand_time(m, 1, 28));
  }
  set_ceased(b, cess);
}

void gen_abrupt(Builder& b) {
  bool near = false;
  const YearMonth cess = draw_cessation(b, near);
  const int offset = months_between(b.spec.cessation_focus, cess);
  int gap;  // silent months between the stop and the declared cessation
  if (near) {
    gap = std::min(8, offset + 2 + static_cast<int>(rng_int(b.rng, 0, 2)));
  } else {
    gap = static_cast<int>(rng_int(b.rng, 1, 3));
  }
  const YearMonth stop = add_months(cess, -gap);
  YearMonth created = add_months(stop, -static_cast<int>(rng_int(b.rng, 14, 40)));
  if (created < b.spec.creation_from) created = b.spec.creation_from;

  launch_burst(b, created, static_cast<int>(rng_int(b.rng, 8, 15)));
  SteadyParams p;
  p.base_commits = static_cast<int>(rng_int(b.rng, 4, 9));
  p.n_maintainers = static_cast<int>(rng_int(b.rng, 2, 4));
  p.n_contributors = static_cast<int>(rng_int(b.rng, 3, 6));

  const Instant stop_at = month_start(stop);
  for (YearMonth m = created; m < cess; m = add_months(m, 1)) {
    if (m < stop) {
      steady_month(b, m, p, stop_at, 1.0, 2, 36, 0.95);
    } else if (rng_unit(b.rng) < 0.3) {
      b.emit(b.fresh_user("stargazer-", m.index()), EventKind::Star, b.rand_time(m, 1, 28));
    }
  }
  set_ceased(b, cess);
}

// ---- matched-surface mode ----
// Every repo emits an identical monthly schedule of countable events; only
// actor structure, latency, titles, and graph overlap differ.

void gen_uniform(Builder& b, bool ceasing, int repo_ordinal) {
  const YearMonth created = b.spec.creation_from;
  YearMonth cess{};
  if (ceasing) {
    const int spread = std::max(1, b.spec.far_window - 1);
    cess = add_months(b.spec.cessation_focus, 1 + (repo_ordinal % spread));
    set_ceased(b, cess);
  }
  const YearMonth last = ceasing ? add_months(cess, -1) : b.spec.observation_end;
  const std::string maint_a = "maint-0@" + b.repo.repo_id;
  const std::string maint_b = "maint-1@" + b.repo.repo_id;
  const std::string contrib_a = "contrib-0@" + b.repo.repo_id;
  const std::string contrib_b = "contrib-1@" + b.repo.repo_id;
  b.emit(maint_a, EventKind::MetaUpdate, month_start(created));

  const YearMonth onset = ceasing ? add_months(cess, -10) : YearMonth{9999, 1};

  for (YearMonth m = created; m <= last; m = add_months(m, 1)) {
    const int mi = months_between(created, m);
    // 6 commits, same LOC for everyone.
    for (int i = 0; i < 6; ++i) {
      const std::string who = ceasing ? maint_a : (i < 3 ? maint_a : maint_b);
      b.emit(who, EventKind::Commit, b.at(m, 2 + i, 10), 120);
    }
    // latency: prompt while healthy, growing toward cessation, always in-month.
    double lat_lo = 6, lat_hi = 48;
    if (ceasing && m >= onset) {
      // Capped so a day-4 open still gets its response inside a 28-day month.
      const int d = months_between(onset, m);
      lat_lo = std::min(440.0, 90.0 * std::pow(1.25, d));
      lat_hi = std::min(500.0, lat_lo + 60.0);
    }
    // 2 issues + 2 PRs, each with exactly one in-month maintainer response.
    for (int i = 0; i < 2; ++i) {
      const std::string opener =
          ceasing ? maint_a : hub_user((mi * 2 + i + repo_ordinal) % 20);
      const std::string thread = b.next_thread("issue");
      const Instant opened = b.at(m, 1 + i, 8);
      b.emit(opener, EventKind::IssueOpen, opened, 0, thread, pick(other_titles(), b.rng));
      b.emit(maint_a, EventKind::IssueComment,
             opened + static_cast<Instant>(rng_range(b.rng, lat_lo, lat_hi) * 3600.0), 0, thread);
    }
    for (int i = 0; i < 2; ++i) {
      const std::string opener = ceasing ? maint_a : (i == 0 ? contrib_a : contrib_b);
      const std::string& title =
          ceasing ? pick(bugfix_titles(), b.rng) : pick(feature_titles(), b.rng);
      const std::string thread = b.next_thread("pr");
      const Instant opened = b.at(m, 3 + i, 9);
      b.emit(opener, EventKind::PrOpen, opened, 0, thread, title);
      const Instant responded =
          opened + static_cast<Instant>(rng_range(b.rng, lat_lo, lat_hi) * 3600.0);
      b.emit(maint_a, EventKind::PrComment, responded, 0, thread);
      if (!ceasing) b.emit(maint_b, EventKind::PrMerge, responded + 3600, 0, thread);
    }
    // 2 stars + 1 fork.
    if (ceasing) {
      b.emit(b.fresh_user("stargazer-a-", mi), EventKind::Star, b.at(m, 10, 12));
      b.emit(b.fresh_user("stargazer-b-", mi), EventKind::Star, b.at(m, 11, 12));
      b.emit(b.fresh_user("forker-", mi), EventKind::Fork, b.at(m, 12, 12));
    } else {
      b.emit(hub_user((mi + repo_ordinal) % 20), EventKind::Star, b.at(m, 10, 12));
      b.emit(b.fresh_user("stargazer-", mi), EventKind::Star, b.at(m, 11, 12));
      b.emit(hub_user((mi + repo_ordinal + 7) % 20), EventKind::Fork, b.at(m, 12, 12));
    }
    if (mi % 3 == 0) b.emit(maint_a, EventKind::TagPush, b.at(m, 26, 18));
  }
}

}  // namespace

std::vector<RepoTimeline> generate_synthetic_corpus(const ScenarioSpec& spec, std::uint64_t seed) {
  if (spec.healthy < 0 || spec.quiet_maintained < 0 || spec.decaying < 0 || spec.abrupt_cease < 0)
    throw ValidationError("scenario counts must be non-negative");
  if (spec.healthy + spec.quiet_maintained + spec.decaying + spec.abrupt_cease <= 0)
    throw ValidationError("scenario must request at least one repository");
  if (spec.creation_to < spec.creation_from || spec.observation_end < spec.creation_to)
    throw ValidationError("scenario months must be ordered: creation range before observation end");

  enum class Archetype { Healthy, Quiet, Decaying, Abrupt };
  struct Plan {
    Archetype a;
    std::string repo_id;
    std::uint64_t seed;
    int ordinal;
  };

  Rng master(seed);
  std::vector<Plan> plans;
  auto add_plans = [&](Archetype a, const char* name, int count) {
    for (int i = 0; i < count; ++i)
      plans.push_back(Plan{a, "synth/" + std::string(name) + "-" + pad3(i), rng_u64(master), i});
  };
  add_plans(Archetype::Healthy, "healthy", spec.healthy);
  add_plans(Archetype::Quiet, "quiet", spec.quiet_maintained);
  add_plans(Archetype::Decaying, "decaying", spec.decaying);
  add_plans(Archetype::Abrupt, "abrupt", spec.abrupt_cease);

  std::vector<RepoTimeline> out;
  out.reserve(plans.size());
  for (const auto& plan : plans) {
    Builder b(spec, plan.repo_id, plan.seed);
    b.repo.label.repo_id = plan.repo_id;
    if (spec.uniform_surface) {
      gen_uniform(b, plan.a == Archetype::Decaying || plan.a == Archetype::Abrupt, plan.ordinal);
    } else {
      switch (plan.a) {
        case Archetype::Healthy: gen_healthy(b, false); break;
        case Archetype::Quiet: gen_healthy(b, true); break;
        case Archetype::Decaying: gen_decaying(b); break;
        case Archetype::Abrupt: gen_abrupt(b); break;
      }
    }
    std::sort(b.repo.events.begin(), b.repo.events.end(), EventOrder{});
    b.repo.created_at = b.repo.events.front().timestamp;
    b.repo.rebuild_months(spec.observation_end);
    out.push_back(std::move(b.repo));
  }
  std::sort(out.begin(), out.end(),
            [](const RepoTimeline& a, const RepoTimeline& z) { return a.repo_id < z.repo_id; });
  return out;
}

}  // namespace vitality
