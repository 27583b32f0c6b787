#include "vitality/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "vitality/core.hpp"

namespace vitality {
namespace evalx {

namespace {

void check_lengths(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || b != c) throw std::invalid_argument("metric inputs must have equal length");
  if (a == 0) throw std::invalid_argument("metric inputs must be non-empty");
}

// (i, j) comparable when i demonstrably fails no later than j.
bool comparable(double di, std::uint8_t ei, double dj, std::uint8_t ej) {
  if (!ei) return false;
  if (di < dj) return true;
  return di == dj && !ej;
}

double concordance_credit(double risk_i, double risk_j) {
  if (risk_i > risk_j) return 1.0;
  if (risk_i == risk_j) return 0.5;
  return 0.0;
}

}  // namespace

ConcordanceResult harrell_c(std::span<const double> risk, std::span<const double> duration,
                            std::span<const std::uint8_t> event) {
  check_lengths(risk.size(), duration.size(), event.size());
  const std::size_t n = risk.size();
  double concordant = 0;
  std::uint64_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!event[i]) continue;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!comparable(duration[i], event[i], duration[j], event[j])) continue;
      ++pairs;
      concordant += concordance_credit(risk[i], risk[j]);
    }
  }
  if (pairs == 0) throw ValidationError("harrell_c: no comparable pairs");
  return {concordant / static_cast<double>(pairs), pairs};
}

double censoring_km_left(std::span<const double> duration, std::span<const std::uint8_t> event,
                         double t) {
  // Kaplan-Meier of the censoring distribution: censorings are the "events".
  std::map<double, std::uint64_t> censored_at;
  for (std::size_t i = 0; i < duration.size(); ++i)
    if (!event[i]) ++censored_at[duration[i]];
  double g = 1.0;
  for (const auto& [time, c] : censored_at) {
    if (!(time < t)) break;
    std::uint64_t at_risk = 0;
    for (double d : duration) at_risk += d >= time;
    if (at_risk == 0) break;
    g *= 1.0 - static_cast<double>(c) / static_cast<double>(at_risk);
  }
  return g;
}

ConcordanceResult uno_c(std::span<const double> risk, std::span<const double> duration,
                        std::span<const std::uint8_t> event, double tau) {
  check_lengths(risk.size(), duration.size(), event.size());
  const double max_duration = *std::max_element(duration.begin(), duration.end());
  if (!(tau > 0) || tau > max_duration)
    throw ValidationError("uno_c: tau must be in (0, max observed duration]");

  const std::size_t n = risk.size();
  double num = 0, den = 0;
  std::uint64_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!event[i] || !(duration[i] < tau)) continue;
    double w = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || !(duration[i] < duration[j])) continue;
      if (w == 0) {
        const double g = censoring_km_left(duration, event, duration[i]);
        if (!(g > 0))
          throw ValidationError("uno_c: censoring survival vanishes before an event time");
        w = 1.0 / (g * g);
      }
      ++pairs;
      num += w * concordance_credit(risk[i], risk[j]);
      den += w;
    }
  }
  if (den == 0) throw ValidationError("uno_c: no usable pairs below tau");
  return {num / den, pairs};
}

ClassificationMetrics classification_metrics(std::span<const std::uint8_t> predicted,
                                             std::span<const std::uint8_t> truth) {
  if (predicted.size() != truth.size() || predicted.empty())
    throw std::invalid_argument("classification_metrics: inputs must be non-empty, equal length");
  ClassificationMetrics m;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] != 0, t = truth[i] != 0;
    m.tp += p && t;
    m.fp += p && !t;
    m.fn += !p && t;
    m.tn += !p && !t;
  }
  const double total = static_cast<double>(predicted.size());
  m.accuracy = static_cast<double>(m.tp + m.tn) / total;
  if (m.tp + m.fp > 0) {
    m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  } else {
    m.precision_undefined = true;
  }
  if (m.tp + m.fn > 0) {
    m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  } else {
    m.recall_undefined = true;
  }
  if (m.precision + m.recall > 0)
    m.f1 = 2 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

}  // namespace evalx
}  // namespace vitality
