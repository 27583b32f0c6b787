#include "vitality/timeline.hpp"

#include <algorithm>

namespace vitality {

std::size_t RepoTimeline::rebuild_months(YearMonth observation_end) {
  months.clear();
  if (events.empty()) return 0;
  const YearMonth first = creation_month();
  YearMonth last = observation_end;
  if (label.ceased()) {
    const YearMonth cess = ym_of(*label.cessation_time);
    if (cess < last) last = cess;
  }
  if (last < first) last = first;
  const int n = months_between(first, last) + 1;
  months.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) months[static_cast<std::size_t>(i)].month = add_months(first, i);

  std::size_t overflow = 0;
  for (const auto& e : events) {
    const int idx = months_between(first, ym_of(e.timestamp));
    if (idx < 0 || idx >= n) {
      ++overflow;  // stray event after the final bucket; kept in the stream
      continue;
    }
    MonthBucket& b = months[static_cast<std::size_t>(idx)];
    switch (e.kind) {
      case EventKind::Star: ++b.stars; break;
      case EventKind::Commit:
        ++b.commits;
        b.loc_sum += e.loc_changed;
        break;
      case EventKind::Fork: ++b.forks; break;
      case EventKind::IssueOpen: ++b.issues; break;
      case EventKind::IssueComment:
      case EventKind::PrComment: ++b.comments; break;
      case EventKind::PrOpen: ++b.prs; break;
      case EventKind::PrMerge: ++b.merges; break;
      case EventKind::TagPush: ++b.tags; break;
      case EventKind::MetaUpdate: continue;  // retained in the stream, not attributable
    }
    ++b.per_user_actions[e.user_id];
  }
  return overflow;
}

const MonthBucket* RepoTimeline::bucket(YearMonth m) const {
  if (months.empty()) return nullptr;
  const int idx = months_between(months.front().month, m);
  if (idx < 0 || idx >= static_cast<int>(months.size())) return nullptr;
  return &months[static_cast<std::size_t>(idx)];
}

bool RepoTimeline::alive_at(YearMonth as_of) const {
  if (creation_month() > as_of) return false;
  if (label.ceased() && ym_of(*label.cessation_time) < as_of) return false;
  return true;
}

bool RepoTimeline::alive_at_instant(Instant t) const {
  if (created_at >= t) return false;
  if (label.ceased() && *label.cessation_time <= t) return false;
  return true;
}

}  // namespace vitality
