#pragma once

#include <cstdint>
#include <vector>

#include "vitality/timeline.hpp"

namespace vitality {

// Scenario archetypes for the bundled synthetic corpus. Statistical
// signatures are documented in docs/fixtures.md.
struct ScenarioSpec {
  int healthy = 0;           // steady activity, ongoing
  int quiet_maintained = 0;  // sparse commits, fast responses, ongoing
  int decaying = 0;          // geometric decline, ceases at a known month
  int abrupt_cease = 0;      // steady then instant stop, ceases shortly after

  YearMonth creation_from{2014, 1};   // creation months drawn from this range
  YearMonth creation_to{2016, 12};
  YearMonth observation_end{2019, 12};
  // Cessation months cluster in (cessation_focus, cessation_focus + near_window];
  // the rest fall up to `far_window` months after the focus.
  YearMonth cessation_focus{2018, 7};
  int near_window = 6;
  int far_window = 14;
  double near_fraction = 0.8;

  // When set, every repo emits identical per-month surface counts; cessation
  // signal lives only in who acts, thread response latency, PR titles, and
  // the user-overlap structure of the interaction graph.
  bool uniform_surface = false;
};

// Deterministic for a fixed seed. Ground-truth labels are embedded.
// Throws ValidationError on non-positive totals or negative counts.
std::vector<RepoTimeline> generate_synthetic_corpus(const ScenarioSpec& spec, std::uint64_t seed);

}  // namespace vitality
