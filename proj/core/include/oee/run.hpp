#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "oee/config.hpp"
#include "oee/novelty.hpp"
#include "oee/stats.hpp"
#include "oee/system_model.hpp"

namespace oee {

// Bumped whenever a change alters the draw order or any artifact byte.
inline constexpr std::string_view kEngineVersion = "oee-engine/1";

// Walks the lifecycle: a virtual binary model, then e (metastable), then the
// sampled entities, rule table, adaptation function and seed (actual).
// Initial sampling uses its own stream derived from the seed, so the model's
// stream starts fresh at tick 0.
SystemModel build_model(const RunConfig& config);

std::uint64_t initial_stream_seed(std::uint64_t seed) noexcept;

struct RunResult {
  EventLog log;
  std::vector<SeriesPoint> series;  // recorded live
  Ledger ledger;
  RuleTable rules;
  SchemaRegistry schemas;
};

using StepObserver = std::function<void(const SystemModel&, const EventBatch&)>;

// Runs config.ticks steps, classifying every event into the ledger.
RunResult simulate(const RunConfig& config, const StepObserver& observer = {});

// Canonical artifact bytes keyed by file name: events.jsonl, series.csv,
// ledger.jsonl, schemas.txt, rules.txt.
using Artifacts = std::map<std::string, std::string>;

Artifacts render(const RunResult& result);

// Config snapshot (without the output directory), engine version, tick range
// and SHA-256 digests of every artifact.
nlohmann::ordered_json make_manifest(const RunConfig& config, const Artifacts& artifacts);
RunConfig config_from_manifest(const nlohmann::json& manifest);
std::string render_manifest(const nlohmann::ordered_json& manifest);

enum class Observable { Increments, Avalanches, Lifetimes };

std::string_view to_string(Observable o) noexcept;
Observable parse_observable(std::string_view text);

struct StatsOptions {
  Observable observable = Observable::Avalanches;
  std::uint64_t x_min = 1;
  bool scan_x_min = false;
};

struct StatsReport {
  Observable observable = Observable::Avalanches;
  std::size_t ticks = 0;
  std::vector<Transition> transitions;
  std::vector<std::uint64_t> avalanche_sizes;
  std::size_t samples = 0;  // size of the fitted observable
  std::optional<PowerLawFit> fit;
  std::string fit_error;  // why fit is empty
  FreezeVerdict freeze;
  bool freeze_checked = false;
  NoveltyCounts novelty;
  std::size_t schemas = 0;
  std::size_t rules = 0;
  std::uint32_t max_diversity = 0;
  std::uint32_t final_diversity = 0;
};

StatsReport compute_stats(const RunConfig& config, const EventLog& log, const RuleTable& rules,
                          const SchemaRegistry& schemas, const Ledger& ledger, const StatsOptions& options);

nlohmann::ordered_json to_json(const StatsReport& report);
std::string to_summary(const StatsReport& report);

}  // namespace oee
