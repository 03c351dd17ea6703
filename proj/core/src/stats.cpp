#include "oee/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "oee/dynamics.hpp"
#include "oee/error.hpp"

namespace oee {

std::string to_jsonl(const EventLog& log) {
  std::vector<EntityIndex> present;
  for (std::size_t i = 0; i < log.initial.size(); ++i) {
    if (log.initial[i] == kPresent) present.push_back(static_cast<EntityIndex>(i));
  }
  nlohmann::ordered_json header;
  header["format"] = "oee-events/1";
  header["e"] = log.capacity;
  header["initial"] = present;
  header["initial_rules"] = log.initial_rules;
  std::string out = header.dump() + '\n';
  for (const auto& batch : log.batches) {
    out += to_json(batch).dump();
    out += '\n';
  }
  return out;
}

EventLog event_log_from_jsonl(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  EventLog log;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::CorruptLog, std::string("unparsable event log line: ") + e.what());
    }
    if (!have_header) {
      try {
        if (j.at("format").get<std::string>() != "oee-events/1") fail(ErrorCode::CorruptLog, "unknown event log format");
        log.capacity = j.at("e").get<std::size_t>();
        log.initial.assign(log.capacity, kAbsent);
        for (auto i : j.at("initial").get<std::vector<EntityIndex>>()) {
          if (i >= log.capacity) fail(ErrorCode::CorruptLog, "initial entity out of range");
          log.initial[i] = kPresent;
        }
        log.initial_rules = j.at("initial_rules").get<std::size_t>();
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::CorruptLog, std::string("malformed event log header: ") + e.what());
      }
      have_header = true;
      continue;
    }
    log.batches.push_back(batch_from_json(j));
  }
  if (!have_header) fail(ErrorCode::CorruptLog, "event log has no header");
  return log;
}

std::vector<SeriesPoint> series_from_log(const EventLog& log, const RuleTable& final_table) {
  if (log.initial.size() != log.capacity || final_table.capacity() != log.capacity) {
    fail(ErrorCode::CorruptLog, "event log and rule table disagree on the entity capacity");
  }
  if (log.initial_rules > final_table.size()) fail(ErrorCode::CorruptLog, "log claims more initial rules than the table holds");

  RuleTable table(log.capacity, final_table.params());
  auto copy_rule = [&](RuleId id) {
    const auto& r = final_table[id];
    table.add(r.schema, r.kind, r.inputs, r.output);
  };
  for (RuleId id = 0; id < log.initial_rules; ++id) copy_rule(id);

  EntityTuple sigma = log.initial;
  ActivityIndex activity(table, sigma);
  std::vector<SeriesPoint> series;
  series.reserve(log.batches.size());

  std::size_t diversity = count_present(sigma);
  for (std::size_t k = 0; k < log.batches.size(); ++k) {
    const auto& batch = log.batches[k];
    if (k > 0 && batch.tick != log.batches[k - 1].tick + 1) {
      fail(ErrorCode::CorruptLog, fmt::format("tick gap before tick {}", batch.tick));
    }
    auto check_cause = [&](const EntityChange& c) {
      if (c.entity >= log.capacity) fail(ErrorCode::CorruptLog, "entity out of range");
      if (c.cause.kind == CauseKind::Rule && c.cause.rule >= table.size()) {
        fail(ErrorCode::CorruptLog, fmt::format("tick {} cites unknown rule {}", batch.tick, c.cause.rule));
      }
    };
    for (const auto& d : batch.destroyed) {
      check_cause(d);
      if (sigma[d.entity] != kPresent) fail(ErrorCode::CorruptLog, fmt::format("tick {} destroys absent entity {}", batch.tick, d.entity));
    }
    for (const auto& c : batch.created) {
      check_cause(c);
      if (sigma[c.entity] != kAbsent) fail(ErrorCode::CorruptLog, fmt::format("tick {} creates present entity {}", batch.tick, c.entity));
    }
    for (const auto& d : batch.destroyed) {
      activity.set_state(table, d.entity, kPresent, kAbsent);
      sigma[d.entity] = kAbsent;
    }
    for (const auto& c : batch.created) {
      activity.set_state(table, c.entity, kAbsent, kPresent);
      sigma[c.entity] = kPresent;
    }
    diversity = diversity + batch.created.size() - batch.destroyed.size();
    for (const auto& added : batch.rules_added) {
      if (added.rule != table.size() || added.rule >= final_table.size()) {
        fail(ErrorCode::CorruptLog, fmt::format("tick {} adds rule {} out of sequence", batch.tick, added.rule));
      }
      copy_rule(added.rule);
      activity.add_rule(table[added.rule], sigma);
    }
    series.push_back({batch.tick, static_cast<std::uint32_t>(diversity),
                      static_cast<std::uint32_t>(activity.complexity(sigma)),
                      static_cast<std::uint32_t>(batch.events_total())});
  }
  return series;
}

std::string to_csv(std::span<const SeriesPoint> series) {
  std::string out = "tick,diversity,complexity,events_total\n";
  for (const auto& p : series) {
    out += fmt::format("{},{},{},{}\n", p.tick, p.diversity, p.complexity, p.events_total);
  }
  return out;
}

std::vector<SeriesPoint> series_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "tick,diversity,complexity,events_total") {
    fail(ErrorCode::ParseError, "series CSV header mismatch");
  }
  std::vector<SeriesPoint> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    SeriesPoint p;
    char c1 = 0, c2 = 0, c3 = 0;
    std::istringstream fields(line);
    if (!(fields >> p.tick >> c1 >> p.diversity >> c2 >> p.complexity >> c3 >> p.events_total) || c1 != ',' ||
        c2 != ',' || c3 != ',') {
      fail(ErrorCode::ParseError, "bad series CSV line: " + line);
    }
    out.push_back(p);
  }
  return out;
}

std::vector<Transition> detect_transitions(std::span<const SeriesPoint> series, const DetectorParams& params,
                                           std::size_t capacity) {
  const auto w = params.window;
  if (w < 1) fail(ErrorCode::InvalidParameter, "detector window must be at least 1");
  if (!(params.theta > 0.0)) fail(ErrorCode::InvalidParameter, "detector threshold must be positive");
  if (!(params.epsilon >= 0.0)) fail(ErrorCode::InvalidParameter, "quiescence rate must be non-negative");
  const auto n = series.size();
  if (w > n) fail(ErrorCode::SeriesTooShort, fmt::format("window {} exceeds series length {}", w, n));

  std::vector<std::uint64_t> prefix(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + series[i].events_total;
  const double quiet_mass = params.epsilon * static_cast<double>(capacity) * static_cast<double>(w);
  // Window [first, first + w) is quiet when its mean is at most epsilon * e.
  auto quiet = [&](std::size_t first) { return static_cast<double>(prefix[first + w] - prefix[first]) <= quiet_mass; };

  std::vector<Transition> out;
  std::size_t a = w - 1;
  // The smallest candidate b = a + 1 still needs a full right flank.
  while (a + 1 + w <= n - 1) {
    std::optional<std::size_t> chosen;
    if (quiet(a + 1 - w)) {
      const auto b_hi = std::min(a + w, n - 1 - w);
      for (auto b = b_hi; b > a; --b) {
        const double delta =
            std::abs(static_cast<double>(series[b].diversity) - static_cast<double>(series[a].diversity));
        if (delta >= params.theta && quiet(b + 1)) {
          chosen = b;
          break;
        }
      }
    }
    if (!chosen) {
      ++a;
      continue;
    }
    const auto b = *chosen;
    const bool up = series[b].diversity > series[a].diversity;
    out.push_back({series[a].tick, series[b].tick,
                   up ? series[b].diversity - series[a].diversity : series[a].diversity - series[b].diversity,
                   up ? Direction::Up : Direction::Down});
    a = b + 1;
  }
  return out;
}

std::vector<std::uint64_t> avalanches(std::span<const SeriesPoint> series, double baseline) {
  if (!(baseline >= 0.0)) fail(ErrorCode::InvalidParameter, "avalanche baseline must be non-negative");
  std::vector<std::uint64_t> sizes;
  std::uint64_t current = 0;
  bool open = false;
  for (const auto& p : series) {
    if (static_cast<double>(p.events_total) > baseline) {
      current += p.events_total;
      open = true;
    } else if (open) {
      sizes.push_back(current);
      current = 0;
      open = false;
    }
  }
  if (open) sizes.push_back(current);
  return sizes;
}

FreezeVerdict freeze_check(std::span<const SeriesPoint> series, std::size_t horizon) {
  if (horizon < 1) fail(ErrorCode::InvalidParameter, "freeze horizon must be at least 1");
  if (series.size() < horizon) {
    fail(ErrorCode::SeriesTooShort, fmt::format("series of {} points is shorter than horizon {}", series.size(), horizon));
  }
  std::size_t run = 0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    run = series[i].events_total == 0 ? run + 1 : 0;
    if (run == horizon + 1) return {true, series[i - horizon].tick};
  }
  return {false, 0};
}

std::vector<std::uint64_t> diversity_increments(std::span<const SeriesPoint> series) {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const auto a = series[i - 1].diversity;
    const auto b = series[i].diversity;
    if (a != b) out.push_back(a > b ? a - b : b - a);
  }
  return out;
}

std::vector<std::uint64_t> lifetimes(const EventLog& log) {
  std::vector<std::optional<Tick>> born(log.capacity);
  std::vector<std::uint64_t> out;
  for (const auto& batch : log.batches) {
    for (const auto& d : batch.destroyed) {
      if (d.entity < born.size() && born[d.entity]) {
        out.push_back(batch.tick - *born[d.entity]);
        born[d.entity].reset();
      }
    }
    for (const auto& c : batch.created) {
      if (c.entity < born.size()) born[c.entity] = batch.tick;
    }
  }
  return out;
}

}  // namespace oee
