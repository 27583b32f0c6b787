#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "vitality/event.hpp"

namespace vitality {

// Aggregated activity for one UTC calendar month.
struct MonthBucket {
  YearMonth month;
  std::uint32_t stars = 0;
  std::uint32_t commits = 0;
  std::uint32_t issues = 0;    // IssueOpen
  std::uint32_t prs = 0;       // PrOpen
  std::uint32_t tags = 0;
  std::uint32_t comments = 0;  // IssueComment + PrComment
  std::uint32_t forks = 0;
  std::uint32_t merges = 0;    // PrMerge
  std::uint64_t loc_sum = 0;
  // All attributable kinds (everything except MetaUpdate), per acting user.
  std::map<std::string, std::uint32_t> per_user_actions;

  bool operator==(const MonthBucket&) const = default;
  [[nodiscard]] std::uint32_t attributable_total() const {
    return stars + commits + issues + prs + tags + comments + forks + merges;
  }
};

// Full per-repository record: label metadata, the raw sorted event stream,
// and the derived contiguous month buckets.
struct RepoTimeline {
  std::string repo_id;
  Instant created_at = 0;  // earliest observed event
  CessationLabel label;
  std::vector<RepoEvent> events;   // sorted by EventOrder; keeps post-cessation strays
  std::vector<MonthBucket> months; // creation month .. min(cessation month, observation end)

  bool operator==(const RepoTimeline&) const = default;

  [[nodiscard]] YearMonth creation_month() const { return ym_of(created_at); }
  // Rebuilds `months` from `events`; buckets stop at the cessation month for
  // ceased repos. Returns the number of events falling after the last bucket.
  std::size_t rebuild_months(YearMonth observation_end);
  [[nodiscard]] const MonthBucket* bucket(YearMonth m) const;
  // True if created by `as_of` and not ceased in an earlier month.
  [[nodiscard]] bool alive_at(YearMonth as_of) const;
  // True if created strictly before `t` and not ceased at or before `t`.
  [[nodiscard]] bool alive_at_instant(Instant t) const;
};

}  // namespace vitality
