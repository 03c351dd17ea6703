#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oee/events.hpp"
#include "oee/rules.hpp"
#include "oee/types.hpp"

namespace oee {

// A persisted run: the initial configuration followed by one batch per tick.
struct EventLog {
  std::size_t capacity = 0;
  EntityTuple initial;
  std::size_t initial_rules = 0;
  std::vector<EventBatch> batches;

  friend bool operator==(const EventLog&, const EventLog&) = default;
};

// events.jsonl: a header object {"format","e","initial","initial_rules"}
// (initial = ascending indices of present entities), then one batch per line.
std::string to_jsonl(const EventLog& log);
EventLog event_log_from_jsonl(std::string_view text);

struct SeriesPoint {
  Tick tick = 0;
  std::uint32_t diversity = 0;     // present entities
  std::uint32_t complexity = 0;    // present entities taking part in an active rule
  std::uint32_t events_total = 0;  // creations + destructions this tick

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

// Replays the log against the final rule table (earlier tables are its
// prefixes) and reports the state after every tick.
std::vector<SeriesPoint> series_from_log(const EventLog& log, const RuleTable& final_table);

// CSV with header `tick,diversity,complexity,events_total`.
std::string to_csv(std::span<const SeriesPoint> series);
std::vector<SeriesPoint> series_from_csv(std::string_view text);

enum class Direction : std::uint8_t { Up, Down };

struct Transition {
  Tick start_tick = 0;
  Tick end_tick = 0;
  std::uint32_t magnitude = 0;
  Direction direction = Direction::Up;

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct DetectorParams {
  std::size_t window = 50;  // W
  double theta = 20.0;      // minimum |diversity change|
  double epsilon = 0.01;    // quiescence: mean events per tick <= epsilon * e

  friend bool operator==(const DetectorParams&, const DetectorParams&) = default;
};

// Punctuated-equilibrium detector. Reports intervals [a, b] (series points)
// with 0 < b - a <= W and |diversity(b) - diversity(a)| >= theta, whose
// flanking windows [a - W + 1, a] and [b + 1, b + W] both have mean
// events_total <= epsilon * capacity. Scans a left to right, takes the
// largest admissible b, and resumes after it, so intervals are disjoint.
std::vector<Transition> detect_transitions(std::span<const SeriesPoint> series, const DetectorParams& params,
                                           std::size_t capacity);

// Sizes (summed events_total) of maximal runs of points with events_total > baseline.
std::vector<std::uint64_t> avalanches(std::span<const SeriesPoint> series, double baseline);

struct FreezeVerdict {
  bool frozen = false;
  Tick tick = 0;  // start of the first all-quiet stretch when frozen

  friend bool operator==(const FreezeVerdict&, const FreezeVerdict&) = default;
};

// Frozen at t when events_total is zero at every point of [t, t + H].
FreezeVerdict freeze_check(std::span<const SeriesPoint> series, std::size_t horizon);

// Non-zero |diversity change| between consecutive points.
std::vector<std::uint64_t> diversity_increments(std::span<const SeriesPoint> series);

// Completed lifetimes (destruction tick - creation tick) of entities created
// during the log. Entities present initially are censored.
std::vector<std::uint64_t> lifetimes(const EventLog& log);

struct PowerLawFit {
  double alpha = 0.0;              // discrete maximum-likelihood exponent
  double alpha_closed_form = 0.0;  // 1 + n / sum ln(x / (x_min - 1/2))
  std::uint64_t x_min = 1;
  std::size_t n_tail = 0;
  double ks = 0.0;  // sup |empirical tail CDF - fitted zeta tail CDF|

  friend bool operator==(const PowerLawFit&, const PowerLawFit&) = default;
};

// Fits p(x) = x^-alpha / zeta(alpha, x_min) to the samples >= x_min.
// Needs at least 10 tail samples, positive samples and x_min >= 1; a tail
// made only of x_min raises DegenerateTail.
PowerLawFit fit_power_law(std::span<const std::uint64_t> samples, std::uint64_t x_min = 1);

// Tries every distinct sample value with at least 10 samples at or above it
// as x_min and keeps the fit with the smallest KS distance.
PowerLawFit fit_power_law_scan(std::span<const std::uint64_t> samples);

// Hurwitz zeta, sum_{k>=0} (k + q)^-s for s > 1, q > 0.
double hurwitz_zeta(double s, double q);

// P(X <= x) of the discrete power law with exponent alpha above x_min.
double power_law_cdf(double alpha, std::uint64_t x_min, std::uint64_t x);

}  // namespace oee
