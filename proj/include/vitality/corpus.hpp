#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vitality/timeline.hpp"

namespace vitality {

struct IngestOptions {
  std::optional<int> min_stars;              // drop repos with fewer lifetime stars
  bool fail_fast = false;                    // otherwise skip-and-count malformed lines
  std::optional<YearMonth> observation_end;  // default: latest event month in the stream
};

struct IngestReport {
  std::size_t lines = 0;
  std::size_t events = 0;
  std::size_t malformed = 0;
  std::size_t repos_filtered = 0;       // below min_stars
  std::size_t post_cessation_events = 0;
  std::vector<std::string> errors;      // "line N: why", capped
  std::vector<std::string> warnings;
};

// Parses a JSON-lines event stream into one timeline per repo_id, bucketed by
// UTC calendar month. Labels default to Ongoing until apply_labels runs.
// Malformed lines throw ValidationError under fail_fast, otherwise they are
// counted and skipped. Output is sorted by repo_id.
std::vector<RepoTimeline> ingest_events(std::istream& stream, const IngestOptions& opts,
                                        IngestReport* report = nullptr);

std::vector<CessationLabel> read_labels(std::istream& stream, bool fail_fast = false,
                                        IngestReport* report = nullptr);

// Attaches labels and re-trims month buckets to the cessation month. Events
// after cessation_time stay in the event stream but are counted as warnings.
void apply_labels(std::vector<RepoTimeline>& timelines, const std::vector<CessationLabel>& labels,
                  YearMonth observation_end, IngestReport* report = nullptr);

// (duration in fractional months, event observed). Right-censors repos that
// are ongoing or whose cessation falls after observation_end (with a warning).
std::pair<double, bool> observed_duration(const RepoTimeline& t, Instant observation_end,
                                          bool* censored_past_end = nullptr);

// ---- timeline store ----
// JSON with stable field ordering; holds label + raw events per repo, month
// buckets are rebuilt on load.

struct CorpusStore {
  YearMonth observation_end;
  std::vector<RepoTimeline> timelines;
};

void save_store(const CorpusStore& store, std::ostream& out);
CorpusStore load_store(std::istream& in);

void write_events_jsonl(const std::vector<RepoTimeline>& timelines, std::ostream& out);
void write_labels_jsonl(const std::vector<RepoTimeline>& timelines, std::ostream& out);

}  // namespace vitality
