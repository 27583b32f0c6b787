#include "vitality/corpus.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>

#include <json.hpp>

namespace vitality {

namespace {

using nlohmann::ordered_json;

constexpr std::size_t kMaxRecordedErrors = 64;

void record_error(IngestReport* report, std::size_t line_no, const std::string& what,
                  bool fail_fast) {
  const std::string msg = "line " + std::to_string(line_no) + ": " + what;
  if (fail_fast) throw ValidationError(msg);
  if (report) {
    ++report->malformed;
    if (report->errors.size() < kMaxRecordedErrors) report->errors.push_back(msg);
  }
}

}  // namespace

std::vector<RepoTimeline> ingest_events(std::istream& stream, const IngestOptions& opts,
                                        IngestReport* report) {
  std::map<std::string, std::vector<RepoEvent>> by_repo;
  YearMonth max_month{1970, 1};
  bool any_event = false;

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (report) ++report->lines;
    if (line.empty()) continue;
    RepoEvent e;
    try {
      e = parse_event_line(line);
    } catch (const ValidationError& err) {
      record_error(report, line_no, err.what(), opts.fail_fast);
      continue;
    }
    const YearMonth m = ym_of(e.timestamp);
    if (!any_event || max_month < m) max_month = m;
    any_event = true;
    by_repo[e.repo_id].push_back(std::move(e));
    if (report) ++report->events;
  }

  const YearMonth observation_end =
      opts.observation_end ? *opts.observation_end : (any_event ? max_month : YearMonth{1970, 1});

  std::vector<RepoTimeline> out;
  out.reserve(by_repo.size());
  for (auto& [repo_id, events] : by_repo) {
    if (opts.min_stars) {
      const auto stars = std::count_if(events.begin(), events.end(),
                                       [](const RepoEvent& e) { return e.kind == EventKind::Star; });
      if (stars < *opts.min_stars) {
        if (report) ++report->repos_filtered;
        continue;
      }
    }
    RepoTimeline t;
    t.repo_id = repo_id;
    t.events = std::move(events);
    std::sort(t.events.begin(), t.events.end(), EventOrder{});
    t.created_at = t.events.front().timestamp;
    t.label.repo_id = repo_id;
    t.rebuild_months(observation_end);
    out.push_back(std::move(t));
  }
  return out;  // map iteration keeps repo_id order
}

std::vector<CessationLabel> read_labels(std::istream& stream, bool fail_fast,
                                        IngestReport* report) {
  std::vector<CessationLabel> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      labels.push_back(parse_label_line(line));
    } catch (const ValidationError& err) {
      record_error(report, line_no, err.what(), fail_fast);
    }
  }
  return labels;
}

void apply_labels(std::vector<RepoTimeline>& timelines, const std::vector<CessationLabel>& labels,
                  YearMonth observation_end, IngestReport* report) {
  std::map<std::string, const CessationLabel*> by_repo;
  for (const auto& l : labels) by_repo[l.repo_id] = &l;
  if (report) {
    std::size_t matched = 0;
    for (const auto& t : timelines) matched += by_repo.count(t.repo_id);
    const std::size_t orphaned = by_repo.size() - matched;
    if (orphaned > 0 && report->warnings.size() < kMaxRecordedErrors)
      report->warnings.push_back(std::to_string(orphaned) +
                                 " label(s) matched no ingested repo (filtered or absent)");
  }
  for (auto& t : timelines) {
    auto it = by_repo.find(t.repo_id);
    if (it == by_repo.end()) continue;
    t.label = *it->second;
    if (t.label.ceased() && *t.label.cessation_time < t.created_at)
      throw ValidationError("repo " + t.repo_id + ": cessation_time precedes creation");
    const std::size_t stray = t.rebuild_months(observation_end);
    if (stray > 0 && report) {
      report->post_cessation_events += stray;
      if (report->warnings.size() < kMaxRecordedErrors)
        report->warnings.push_back("repo " + t.repo_id + ": " + std::to_string(stray) +
                                   " event(s) after cessation retained but not bucketed");
    }
  }
}

std::pair<double, bool> observed_duration(const RepoTimeline& t, Instant observation_end,
                                          bool* censored_past_end) {
  if (observation_end < t.created_at)
    throw ValidationError("repo " + t.repo_id + ": observation_end precedes creation");
  if (censored_past_end) *censored_past_end = false;
  if (t.label.ceased()) {
    const Instant cess = *t.label.cessation_time;
    if (cess <= observation_end) return {months_between_frac(t.created_at, cess), true};
    if (censored_past_end) *censored_past_end = true;  // cessation beyond the window
  }
  return {months_between_frac(t.created_at, observation_end), false};
}

// ---- store ----

void save_store(const CorpusStore& store, std::ostream& out) {
  ordered_json j;
  j["version"] = 1;
  j["observation_end"] = store.observation_end.str();
  ordered_json repos = ordered_json::array();
  for (const auto& t : store.timelines) {
    ordered_json r;
    r["repo_id"] = t.repo_id;
    r["created_at"] = format_instant(t.created_at);
    r["label"] = ordered_json::parse(label_to_json_line(t.label));
    ordered_json events = ordered_json::array();
    for (const auto& e : t.events) events.push_back(ordered_json::parse(event_to_json_line(e)));
    r["events"] = std::move(events);
    repos.push_back(std::move(r));
  }
  j["repos"] = std::move(repos);
  out << j.dump(1) << '\n';
}

CorpusStore load_store(std::istream& in) {
  ordered_json j = ordered_json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("repos"))
    throw ValidationError("timeline store: malformed JSON");
  CorpusStore store;
  store.observation_end = parse_year_month(j.at("observation_end").get<std::string>());
  for (const auto& r : j.at("repos")) {
    RepoTimeline t;
    t.repo_id = r.at("repo_id").get<std::string>();
    t.created_at = parse_instant(r.at("created_at").get<std::string>());
    t.label = parse_label_line(r.at("label").dump());
    for (const auto& e : r.at("events")) t.events.push_back(parse_event_line(e.dump()));
    std::sort(t.events.begin(), t.events.end(), EventOrder{});
    t.rebuild_months(store.observation_end);
    store.timelines.push_back(std::move(t));
  }
  return store;
}

void write_events_jsonl(const std::vector<RepoTimeline>& timelines, std::ostream& out) {
  for (const auto& t : timelines)
    for (const auto& e : t.events) out << event_to_json_line(e) << '\n';
}

void write_labels_jsonl(const std::vector<RepoTimeline>& timelines, std::ostream& out) {
  for (const auto& t : timelines) out << label_to_json_line(t.label) << '\n';
}

}  // namespace vitality
