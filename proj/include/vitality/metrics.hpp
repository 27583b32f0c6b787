#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace vitality {
namespace evalx {

struct ConcordanceResult {
  double value = 0;
  std::uint64_t pairs = 0;  // comparable (Harrell) or weighted-count basis (Uno)
};

// Harrell's C: over comparable pairs (earlier duration with an observed
// event, or equal durations where exactly the earlier-failing one has the
// event), concordant when the failing sample carries the higher risk; risk
// ties count 0.5. Throws ValidationError when no pair is comparable.
ConcordanceResult harrell_c(std::span<const double> risk, std::span<const double> duration,
                            std::span<const std::uint8_t> event);

// Uno's IPCW concordance truncated at tau: pairs (i,j) with event_i,
// duration_i < duration_j and duration_i < tau, weighted by the inverse
// squared Kaplan-Meier censoring survival just before duration_i.
ConcordanceResult uno_c(std::span<const double> risk, std::span<const double> duration,
                        std::span<const std::uint8_t> event, double tau);

// Kaplan-Meier survival of the censoring distribution evaluated at t- (left
// limit). Exposed for tests and diagnostics.
double censoring_km_left(std::span<const double> duration, std::span<const std::uint8_t> event,
                         double t);

struct ClassificationMetrics {
  double accuracy = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
  bool precision_undefined = false;  // no positive predictions
  bool recall_undefined = false;     // no actual positives
};

ClassificationMetrics classification_metrics(std::span<const std::uint8_t> predicted,
                                             std::span<const std::uint8_t> truth);

}  // namespace evalx
}  // namespace vitality
