#include "oee/run.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "oee/digest.hpp"
#include "oee/error.hpp"

namespace oee {

std::uint64_t initial_stream_seed(std::uint64_t seed) noexcept { return seed ^ 0x9e3779b97f4a7c15ULL; }

SystemModel build_model(const RunConfig& config) {
  validate(config);
  auto model = new_system_model(StateSet::binary());
  ParameterAssignment shape;
  shape.capacity = config.e;
  model = concretise(std::move(model), shape);

  AdaptationFunction psi;
  psi.policy = {config.rho_new, config.prod_share, config.p_schema};
  psi.schemas = SchemaRegistry::with_seed(config.seed_schema_kind, config.seed_arity);

  Rng init(initial_stream_seed(config.seed));
  const DynamicsParams params{config.lambda, config.p_plus, config.env_e, config.env_decay};
  auto initial = sample_initial(config.e, config.n0, psi.schemas.at(0), config.r_density, init, params);

  ParameterAssignment rest;
  rest.entities = std::move(initial.sigma);
  rest.update = std::move(initial.table);
  rest.adaptation = std::move(psi);
  rest.seed = config.seed;
  return concretise(std::move(model), rest);
}

RunResult simulate(const RunConfig& config, const StepObserver& observer) {
  auto model = build_model(config);
  RunResult result;
  result.log.capacity = config.e;
  result.log.initial = *model.entities();
  result.log.initial_rules = model.rules()->size();
  result.log.batches.reserve(config.ticks);
  result.series.reserve(config.ticks);

  for (std::uint64_t t = 0; t < config.ticks; ++t) {
    const auto before = snapshot_of(*model.rules(), model.adaptation()->schemas);
    auto batch = model.step();
    const auto after = snapshot_of(*model.rules(), model.adaptation()->schemas);
    const auto classes = classify_batch(batch, before, after);
    ledger_append(result.ledger, batch.tick, batch, classes);
    result.series.push_back({batch.tick, static_cast<std::uint32_t>(count_present(*model.entities())),
                             static_cast<std::uint32_t>(model.complexity()),
                             static_cast<std::uint32_t>(batch.events_total())});
    if (observer) observer(model, batch);
    result.log.batches.push_back(std::move(batch));
  }
  result.rules = *model.rules();
  result.schemas = model.adaptation()->schemas;
  return result;
}

Artifacts render(const RunResult& result) {
  Artifacts a;
  a["events.jsonl"] = to_jsonl(result.log);
  a["series.csv"] = to_csv(result.series);
  a["ledger.jsonl"] = to_jsonl(result.ledger);
  a["schemas.txt"] = to_text(result.schemas);
  a["rules.txt"] = to_text(result.rules);
  return a;
}

namespace {

nlohmann::ordered_json config_object(const RunConfig& config) {
  nlohmann::ordered_json obj = nlohmann::ordered_json::object();
  const auto text = to_text(config, false);
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = text.find('\n', pos);
    const auto line = text.substr(pos, end - pos);
    const auto eq = line.find(" = ");
    obj[line.substr(0, eq)] = line.substr(eq + 3);
    pos = end + 1;
  }
  return obj;
}

}  // namespace

nlohmann::ordered_json make_manifest(const RunConfig& config, const Artifacts& artifacts) {
  nlohmann::ordered_json m;
  m["engine_version"] = kEngineVersion;
  m["config"] = config_object(config);
  m["start_tick"] = 0;
  m["end_tick"] = config.ticks;
  auto digests = nlohmann::ordered_json::object();
  for (const auto& [name, bytes] : artifacts) digests[name] = sha256_hex(bytes);
  m["digests"] = std::move(digests);
  return m;
}

RunConfig config_from_manifest(const nlohmann::json& manifest) {
  RunConfig config;
  try {
    for (const auto& [key, value] : manifest.at("config").items()) {
      set_field(config, key, value.get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::InvalidConfig, std::string("manifest config is malformed: ") + e.what());
  }
  validate(config);
  return config;
}

std::string render_manifest(const nlohmann::ordered_json& manifest) { return manifest.dump(2) + '\n'; }

std::string_view to_string(Observable o) noexcept {
  switch (o) {
    case Observable::Increments: return "increments";
    case Observable::Avalanches: return "avalanches";
    case Observable::Lifetimes: return "lifetimes";
  }
  return "?";
}

Observable parse_observable(std::string_view text) {
  if (text == "increments") return Observable::Increments;
  if (text == "avalanches") return Observable::Avalanches;
  if (text == "lifetimes") return Observable::Lifetimes;
  fail(ErrorCode::InvalidConfig, "observable must be increments|avalanches|lifetimes, got '" + std::string(text) + "'");
}

StatsReport compute_stats(const RunConfig& config, const EventLog& log, const RuleTable& rules,
                          const SchemaRegistry& schemas, const Ledger& ledger, const StatsOptions& options) {
  StatsReport report;
  report.observable = options.observable;
  const auto series = series_from_log(log, rules);
  report.ticks = series.size();
  report.schemas = schemas.size();
  report.rules = rules.size();
  for (const auto& p : series) report.max_diversity = std::max(report.max_diversity, p.diversity);
  if (!series.empty()) report.final_diversity = series.back().diversity;

  const auto params = config.detector();
  if (series.size() >= params.window) report.transitions = detect_transitions(series, params, config.e);
  report.avalanche_sizes = avalanches(series, config.quiet_baseline());
  if (series.size() >= config.freeze_horizon) {
    report.freeze = freeze_check(series, config.freeze_horizon);
    report.freeze_checked = true;
  }
  if (!series.empty()) report.novelty = novelty_counts(ledger, series.front().tick, series.back().tick);

  std::vector<std::uint64_t> samples;
  switch (options.observable) {
    case Observable::Increments: samples = diversity_increments(series); break;
    case Observable::Avalanches: samples = report.avalanche_sizes; break;
    case Observable::Lifetimes: samples = lifetimes(log); break;
  }
  report.samples = samples.size();
  try {
    report.fit = options.scan_x_min ? fit_power_law_scan(samples) : fit_power_law(samples, options.x_min);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientSamples && e.code() != ErrorCode::DegenerateTail) throw;
    report.fit_error = std::string(to_string(e.code()));
  }
  return report;
}

nlohmann::ordered_json to_json(const StatsReport& r) {
  nlohmann::ordered_json j;
  j["engine_version"] = kEngineVersion;
  j["ticks"] = r.ticks;
  j["rules"] = r.rules;
  j["schemas"] = r.schemas;
  j["max_diversity"] = r.max_diversity;
  j["final_diversity"] = r.final_diversity;
  auto transitions = nlohmann::ordered_json::array();
  for (const auto& t : r.transitions) {
    transitions.push_back(nlohmann::ordered_json{{"start_tick", t.start_tick},
                                                 {"end_tick", t.end_tick},
                                                 {"magnitude", t.magnitude},
                                                 {"direction", t.direction == Direction::Up ? "up" : "down"}});
  }
  j["transitions"] = std::move(transitions);
  j["avalanches"] = r.avalanche_sizes.size();
  nlohmann::ordered_json fit;
  fit["observable"] = to_string(r.observable);
  fit["samples"] = r.samples;
  if (r.fit) {
    fit["alpha"] = r.fit->alpha;
    fit["alpha_closed_form"] = r.fit->alpha_closed_form;
    fit["x_min"] = r.fit->x_min;
    fit["n_tail"] = r.fit->n_tail;
    fit["ks"] = r.fit->ks;
  } else {
    fit["error"] = r.fit_error;
  }
  j["power_law"] = std::move(fit);
  if (r.freeze_checked) {
    j["freeze"] = r.freeze.frozen ? nlohmann::ordered_json{{"verdict", "frozen"}, {"tick", r.freeze.tick}}
                                  : nlohmann::ordered_json{{"verdict", "active"}};
  } else {
    j["freeze"] = nlohmann::ordered_json{{"verdict", "unchecked"}};
  }
  j["novelty"] = nlohmann::ordered_json{{"exploratory", r.novelty.exploratory},
                                        {"expansive", r.novelty.expansive},
                                        {"transformational", r.novelty.transformational}};
  return j;
}

std::string to_summary(const StatsReport& r) {
  std::string out;
  out += fmt::format("ticks              {}\n", r.ticks);
  out += fmt::format("diversity          max {} final {}\n", r.max_diversity, r.final_diversity);
  out += fmt::format("rules / schemas    {} / {}\n", r.rules, r.schemas);
  out += fmt::format("transitions        {}\n", r.transitions.size());
  for (const auto& t : r.transitions) {
    out += fmt::format("  {:>8} -> {:<8} {} {}\n", t.start_tick, t.end_tick, t.direction == Direction::Up ? "up  " : "down",
                       t.magnitude);
  }
  out += fmt::format("avalanches         {}\n", r.avalanche_sizes.size());
  if (r.fit) {
    out += fmt::format("power law ({})  alpha {:.4f} (closed form {:.4f}) x_min {} n_tail {} ks {:.4f}\n",
                       to_string(r.observable), r.fit->alpha, r.fit->alpha_closed_form, r.fit->x_min, r.fit->n_tail,
                       r.fit->ks);
  } else {
    out += fmt::format("power law ({})  not fitted: {} ({} samples)\n", to_string(r.observable), r.fit_error, r.samples);
  }
  if (!r.freeze_checked) out += "freeze             unchecked (run shorter than horizon)\n";
  else if (r.freeze.frozen) out += fmt::format("freeze             frozen at tick {}\n", r.freeze.tick);
  else out += "freeze             active\n";
  out += fmt::format("novelty            exploratory {} expansive {} transformational {}\n", r.novelty.exploratory,
                     r.novelty.expansive, r.novelty.transformational);
  return out;
}

}  // namespace oee
