#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "vitality/core.hpp"

namespace vitality {

enum class EventKind {
  Star,
  Commit,
  Fork,
  IssueOpen,
  IssueComment,
  PrOpen,
  PrMerge,
  PrComment,
  TagPush,
  MetaUpdate,
};

std::string_view kind_name(EventKind k);
std::optional<EventKind> kind_from_name(std::string_view name);

// One timestamped user action on a repository.
struct RepoEvent {
  std::string repo_id;
  std::string user_id;
  EventKind kind = EventKind::Star;
  Instant timestamp = 0;
  std::uint64_t loc_changed = 0;  // lines added+deleted; Commit only
  std::optional<std::string> thread_id;
  std::optional<std::string> title;

  bool operator==(const RepoEvent&) const = default;
};

// thread_id must be present for these kinds and absent for Star/Fork/TagPush.
bool thread_required(EventKind k);
bool thread_forbidden(EventKind k);

// Deterministic event order: (timestamp, user_id, kind, thread_id, loc).
struct EventOrder {
  bool operator()(const RepoEvent& a, const RepoEvent& b) const {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    if (a.user_id != b.user_id) return a.user_id < b.user_id;
    if (a.kind != b.kind) return a.kind < b.kind;
    const auto& ta = a.thread_id ? *a.thread_id : std::string();
    const auto& tb = b.thread_id ? *b.thread_id : std::string();
    if (ta != tb) return ta < tb;
    return a.loc_changed < b.loc_changed;
  }
};

enum class CessationStatus { Ongoing, Ceased };
enum class CessationSource { Archived, DeclaredInDocs };

// Ground-truth label; labels are inputs to this engine, never derived by it.
struct CessationLabel {
  std::string repo_id;
  CessationStatus status = CessationStatus::Ongoing;
  std::optional<Instant> cessation_time;
  std::optional<CessationSource> source;

  bool operator==(const CessationLabel&) const = default;
  [[nodiscard]] bool ceased() const { return status == CessationStatus::Ceased; }
};

// JSON-lines wire format, field names as declared above; unknown fields ignored.
RepoEvent parse_event_line(std::string_view line);
std::string event_to_json_line(const RepoEvent& e);
CessationLabel parse_label_line(std::string_view line);
std::string label_to_json_line(const CessationLabel& l);

}  // namespace vitality
