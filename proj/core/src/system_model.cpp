#include "oee/system_model.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "oee/digest.hpp"
#include "oee/error.hpp"

namespace oee {

SystemModel::SystemModel(StateSet states) : states_(std::move(states)) {}

void SystemModel::check_consistency(const ParameterAssignment& p) const {
  auto conflict = [](const auto& have, const auto& want, const char* field) {
    if (have && want && !(*have == *want)) {
      fail(ErrorCode::ConflictingAssignment, fmt::format("{} is already assigned a different value", field));
    }
  };
  conflict(capacity_, p.capacity, "e");
  conflict(entities_, p.entities, "entities");
  conflict(update_, p.update, "update function");
  conflict(adaptation_, p.adaptation, "adaptation function");
  conflict(target_, p.target, "target");
  conflict(seed_, p.seed, "seed");

  if (p.capacity && *p.capacity == 0) fail(ErrorCode::InvalidParameter, "e must be positive");

  const auto* cap = capacity_ ? &*capacity_ : (p.capacity ? &*p.capacity : nullptr);
  const auto* entities = entities_ ? &*entities_ : (p.entities ? &*p.entities : nullptr);
  const auto* update = update_ ? &*update_ : (p.update ? &*p.update : nullptr);
  const auto* adaptation = adaptation_ ? &*adaptation_ : (p.adaptation ? &*p.adaptation : nullptr);

  if (entities) {
    for (auto s : *entities) {
      if (!states_.contains(s)) fail(ErrorCode::InvalidParameter, fmt::format("entity state {} not in the state set", s));
    }
    if (cap && entities->size() != *cap) {
      fail(ErrorCode::InvalidParameter,
           fmt::format("entity tuple length {} differs from e = {}", entities->size(), *cap));
    }
  }
  if (update) {
    if (!states_.is_binary()) {
      fail(ErrorCode::UnsupportedStateSet, "the rule-based update function requires the state set {0, 1}");
    }
    if (cap && update->capacity() != *cap) {
      fail(ErrorCode::InvalidParameter,
           fmt::format("rule table capacity {} differs from e = {}", update->capacity(), *cap));
    }
  }
  if (adaptation) {
    validate(adaptation->policy);
    if (adaptation->schemas.empty()) fail(ErrorCode::NoSchema, "the adaptation function needs a schema");
    if (cap && adaptation->policy.rho_new > 0) {
      auto usable = [&](RuleKind kind) {
        return std::any_of(adaptation->schemas.schemas().begin(), adaptation->schemas.schemas().end(),
                           [&](const RuleSchema& s) { return s.allows(kind) && s.arity + 1 <= *cap; });
      };
      if ((adaptation->policy.prod_share > 0.0 && !usable(RuleKind::Productive)) ||
          (adaptation->policy.prod_share < 1.0 && !usable(RuleKind::Destructive))) {
        fail(ErrorCode::NoSchema, "no schema can instantiate the rule kinds the policy samples");
      }
    }
  }
}

void SystemModel::concretise(const ParameterAssignment& p) {
  if (regime_ == Regime::Actual) {
    fail(ErrorCode::InvalidRegime, "an actual model can no longer be concretised");
  }
  check_consistency(p);

  if (p.capacity) capacity_ = p.capacity;
  if (p.entities && !entities_) entities_ = p.entities;
  if (p.update && !update_) update_ = p.update;
  if (p.adaptation && !adaptation_) adaptation_ = p.adaptation;
  if (p.target && !target_) target_ = p.target;
  if (p.seed) seed_ = p.seed;

  const bool complete = capacity_ && entities_ && update_ && adaptation_ && seed_;
  const bool any = capacity_ || entities_ || update_ || adaptation_ || target_ || seed_;
  if (complete) {
    become_actual();
  } else if (any) {
    regime_ = Regime::Metastable;
  }
}

void SystemModel::become_actual() {
  tick_ = 0;
  milieus_ = milieus_of(*update_);
  activity_ = ActivityIndex(*update_, *entities_);
  rng_ = Rng(*seed_);
  regime_ = Regime::Actual;
}

EventBatch SystemModel::step() {
  if (regime_ != Regime::Actual) {
    fail(ErrorCode::NotActual, fmt::format("cannot step a {} model", to_string(regime_)));
  }
  const Tick t = tick_ + 1;
  auto& table = *update_;
  auto& sigma = *entities_;
  auto& psi = *adaptation_;

  auto batch = apply_update(table, sigma, activity_, rng_, t);
  const auto first_new = table.size();
  apply_adaptation(table, milieus_, batch, psi.policy, psi.schemas, rng_);
  for (auto id = first_new; id < table.size(); ++id) activity_.add_rule(table[static_cast<RuleId>(id)], sigma);
  if (auto schema = genesis_schema(psi.schemas, psi.policy.p_schema, rng_, t)) {
    batch.schemas_added.push_back(schema->id);
  }
  tick_ = t;
  return batch;
}

std::size_t SystemModel::complexity() const {
  if (regime_ != Regime::Actual) fail(ErrorCode::NotActual, "complexity needs an actual model");
  return activity_.complexity(*entities_);
}

bool operator==(const SystemModel& a, const SystemModel& b) {
  return a.states_ == b.states_ && a.regime_ == b.regime_ && a.capacity_ == b.capacity_ &&
         a.entities_ == b.entities_ && a.update_ == b.update_ && a.adaptation_ == b.adaptation_ &&
         a.target_ == b.target_ && a.seed_ == b.seed_ && a.tick_ == b.tick_ && a.milieus_ == b.milieus_ &&
         a.activity_ == b.activity_ && a.rng_ == b.rng_;
}

SystemModel new_system_model(StateSet states) { return SystemModel(std::move(states)); }

SystemModel concretise(SystemModel model, const ParameterAssignment& params) {
  model.concretise(params);
  return model;
}

std::pair<SystemModel, EventBatch> step(SystemModel model) {
  auto batch = model.step();
  return {std::move(model), std::move(batch)};
}

Regime regime_of(const SystemModel& model) { return model.regime(); }

namespace {

using Sections = std::map<std::string, std::map<std::string, std::string>, std::less<>>;

Sections parse_sections(std::string_view text) {
  Sections out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::string section;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(ErrorCode::ParseError, "bad section header: " + line);
      section = line.substr(1, line.size() - 2);
      out[section];
      continue;
    }
    const auto eq = line.find(" = ");
    if (eq == std::string::npos || section.empty()) fail(ErrorCode::ParseError, "bad model line: " + line);
    out[section][line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

const std::string* lookup(const Sections& s, std::string_view section, std::string_view key) {
  auto sec = s.find(section);
  if (sec == s.end()) return nullptr;
  auto it = sec->second.find(std::string(key));
  return it == sec->second.end() ? nullptr : &it->second;
}

const std::string& require(const Sections& s, std::string_view section, std::string_view key) {
  if (const auto* v = lookup(s, section, key)) return *v;
  fail(ErrorCode::ParseError, fmt::format("missing {}.{}", section, key));
}

template <class T>
T to_int(const std::string& text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    fail(ErrorCode::ParseError, "bad integer '" + text + "'");
  }
  return value;
}

double to_real(const std::string& text) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) fail(ErrorCode::ParseError, "bad number '" + text + "'");
  return v;
}

std::vector<State> to_states(const std::string& text) {
  std::vector<State> out;
  std::string_view rest = text;
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    out.push_back(to_int<State>(std::string(rest.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return out;
}

std::string join_states(const std::vector<State>& states) {
  std::string out;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(static_cast<unsigned>(states[i]));
  }
  return out;
}

}  // namespace

std::string to_text(const SystemModel& model) {
  std::string out;
  out += "[model]\nformat = oee-model/1\n";
  out += fmt::format("regime = {}\n", to_string(model.regime()));
  out += fmt::format("tick = {}\n", model.tick());
  out += fmt::format("[state_set]\nstates = {}\n", join_states(model.state_set().states()));
  if (model.capacity() || model.entities()) {
    out += "[entities]\n";
    if (const auto* e = model.capacity()) out += fmt::format("e = {}\n", *e);
    if (const auto* s = model.entities()) out += fmt::format("values = {}\n", join_states(*s));
  }
  if (const auto* rules = model.rules()) {
    out += "[update]\n";
    out += fmt::format("rule_count = {}\n", rules->size());
    out += fmt::format("rules_sha256 = {}\n", sha256_hex(to_text(*rules)));
  }
  if (const auto* psi = model.adaptation()) {
    out += "[adaptation]\n";
    out += fmt::format("rho_new = {}\n", psi->policy.rho_new);
    out += fmt::format("prod_share = {}\n", format_double(psi->policy.prod_share));
    out += fmt::format("p_schema = {}\n", format_double(psi->policy.p_schema));
    out += fmt::format("schema_count = {}\n", psi->schemas.size());
    out += fmt::format("schemas_sha256 = {}\n", sha256_hex(to_text(psi->schemas)));
  }
  if (const auto* target = model.target()) out += fmt::format("[target]\nname = {}\n", target->name);
  if (const auto* seed = model.seed()) {
    out += fmt::format("[rng]\nseed = {}\n", *seed);
    if (const auto* rng = model.rng()) out += fmt::format("draws = {}\n", rng->draws());
  }
  return out;
}

SystemModel system_model_from_text(std::string_view text, const RuleTable* rules,
                                   const SchemaRegistry* schemas) {
  const auto doc = parse_sections(text);
  if (require(doc, "model", "format") != "oee-model/1") fail(ErrorCode::ParseError, "unsupported model format");
  const auto regime = parse_regime(require(doc, "model", "regime"));
  const auto tick = to_int<Tick>(require(doc, "model", "tick"));

  SystemModel model(StateSet::make(to_states(require(doc, "state_set", "states"))));
  ParameterAssignment p;
  if (const auto* e = lookup(doc, "entities", "e")) p.capacity = to_int<std::size_t>(*e);
  if (const auto* v = lookup(doc, "entities", "values")) p.entities = to_states(*v);
  if (const auto* digest = lookup(doc, "update", "rules_sha256")) {
    if (!rules) fail(ErrorCode::ParseError, "model references a rule table that was not supplied");
    if (sha256_hex(to_text(*rules)) != *digest) fail(ErrorCode::ParseError, "rule table digest mismatch");
    p.update = *rules;
  }
  if (const auto* digest = lookup(doc, "adaptation", "schemas_sha256")) {
    if (!schemas) fail(ErrorCode::ParseError, "model references a schema registry that was not supplied");
    if (sha256_hex(to_text(*schemas)) != *digest) fail(ErrorCode::ParseError, "schema registry digest mismatch");
    AdaptationFunction psi;
    psi.policy.rho_new = to_int<int>(require(doc, "adaptation", "rho_new"));
    psi.policy.prod_share = to_real(require(doc, "adaptation", "prod_share"));
    psi.policy.p_schema = to_real(require(doc, "adaptation", "p_schema"));
    psi.schemas = *schemas;
    p.adaptation = std::move(psi);
  }
  if (const auto* name = lookup(doc, "target", "name")) p.target = Target{*name, {}};
  if (const auto* seed = lookup(doc, "rng", "seed")) p.seed = to_int<std::uint64_t>(*seed);

  model.concretise(p);
  if (model.regime() != regime) fail(ErrorCode::ParseError, "declared regime does not match the assigned fields");
  if (regime == Regime::Actual) {
    model.tick_ = tick;
    model.rng_ = Rng::restore(*model.seed_, to_int<std::uint64_t>(require(doc, "rng", "draws")));
  } else if (tick != 0) {
    fail(ErrorCode::ParseError, "only actual models can have a non-zero tick");
  }
  return model;
}

}  // namespace oee
