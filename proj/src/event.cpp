#include "vitality/event.hpp"

#include <json.hpp>

namespace vitality {

namespace {

using nlohmann::ordered_json;

constexpr std::string_view kKindNames[] = {
    "Star",    "Commit",  "Fork",      "IssueOpen", "IssueComment",
    "PrOpen",  "PrMerge", "PrComment", "TagPush",   "MetaUpdate",
};

ordered_json parse_object(std::string_view line, const char* what) {
  ordered_json j = ordered_json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw ValidationError(std::string("not a JSON object (") + what + ")");
  return j;
}

std::string require_string(const ordered_json& j, const char* field) {
  auto it = j.find(field);
  if (it == j.end() || !it->is_string())
    throw ValidationError(std::string("missing or non-string field '") + field + "'");
  return it->get<std::string>();
}

}  // namespace

std::string_view kind_name(EventKind k) { return kKindNames[static_cast<int>(k)]; }

std::optional<EventKind> kind_from_name(std::string_view name) {
  for (int i = 0; i < 10; ++i)
    if (kKindNames[i] == name) return static_cast<EventKind>(i);
  return std::nullopt;
}

bool thread_required(EventKind k) {
  return k == EventKind::IssueComment || k == EventKind::PrComment || k == EventKind::PrMerge;
}

bool thread_forbidden(EventKind k) {
  return k == EventKind::Star || k == EventKind::Fork || k == EventKind::TagPush;
}

RepoEvent parse_event_line(std::string_view line) {
  const ordered_json j = parse_object(line, "event");
  RepoEvent e;
  e.repo_id = require_string(j, "repo_id");
  e.user_id = require_string(j, "user_id");
  const std::string kind = require_string(j, "kind");
  const auto k = kind_from_name(kind);
  if (!k) throw ValidationError("unknown event kind '" + kind + "'");
  e.kind = *k;
  e.timestamp = parse_instant(require_string(j, "timestamp"));
  if (auto it = j.find("loc_changed"); it != j.end()) {
    if (!it->is_number_unsigned() && !it->is_number_integer())
      throw ValidationError("loc_changed must be a non-negative integer");
    const auto v = it->get<std::int64_t>();
    if (v < 0) throw ValidationError("loc_changed must be non-negative");
    e.loc_changed = static_cast<std::uint64_t>(v);
  }
  if (auto it = j.find("thread_id"); it != j.end() && it->is_string())
    e.thread_id = it->get<std::string>();
  if (auto it = j.find("title"); it != j.end() && it->is_string())
    e.title = it->get<std::string>();

  if (e.loc_changed != 0 && e.kind != EventKind::Commit)
    throw ValidationError("loc_changed must be 0 for kind '" + kind + "'");
  if (thread_required(e.kind) && !e.thread_id)
    throw ValidationError("thread_id required for kind '" + kind + "'");
  if (thread_forbidden(e.kind) && e.thread_id)
    throw ValidationError("thread_id not allowed for kind '" + kind + "'");
  return e;
}

std::string event_to_json_line(const RepoEvent& e) {
  ordered_json j;
  j["repo_id"] = e.repo_id;
  j["user_id"] = e.user_id;
  j["kind"] = std::string(kind_name(e.kind));
  j["timestamp"] = format_instant(e.timestamp);
  if (e.kind == EventKind::Commit) j["loc_changed"] = e.loc_changed;
  if (e.thread_id) j["thread_id"] = *e.thread_id;
  if (e.title) j["title"] = *e.title;
  return j.dump();
}

CessationLabel parse_label_line(std::string_view line) {
  const ordered_json j = parse_object(line, "label");
  CessationLabel l;
  l.repo_id = require_string(j, "repo_id");
  const std::string status = require_string(j, "status");
  if (status == "Ongoing") {
    l.status = CessationStatus::Ongoing;
  } else if (status == "Ceased") {
    l.status = CessationStatus::Ceased;
  } else {
    throw ValidationError("unknown status '" + status + "'");
  }
  if (auto it = j.find("cessation_time"); it != j.end() && it->is_string())
    l.cessation_time = parse_instant(it->get<std::string>());
  if (auto it = j.find("source"); it != j.end() && it->is_string()) {
    const auto s = it->get<std::string>();
    if (s == "Archived") {
      l.source = CessationSource::Archived;
    } else if (s == "DeclaredInDocs") {
      l.source = CessationSource::DeclaredInDocs;
    } else {
      throw ValidationError("unknown source '" + s + "'");
    }
  }
  const bool complete = l.cessation_time.has_value() && l.source.has_value();
  if (l.ceased() != complete)
    throw ValidationError("status Ceased requires cessation_time and source, Ongoing forbids them");
  return l;
}

std::string label_to_json_line(const CessationLabel& l) {
  ordered_json j;
  j["repo_id"] = l.repo_id;
  j["status"] = l.ceased() ? "Ceased" : "Ongoing";
  if (l.cessation_time) j["cessation_time"] = format_instant(*l.cessation_time);
  if (l.source)
    j["source"] = *l.source == CessationSource::Archived ? "Archived" : "DeclaredInDocs";
  return j.dump();
}

}  // namespace vitality
