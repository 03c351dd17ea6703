#include "oee/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "oee/error.hpp"

namespace oee {

namespace {

bool contains(const std::vector<EntityIndex>& v, EntityIndex x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

// Uniform index in [0, e) not already in `used`; appended to `used`.
EntityIndex draw_fresh(Rng& rng, std::size_t e, std::vector<EntityIndex>& used) {
  for (;;) {
    const auto x = static_cast<EntityIndex>(rng.below(e));
    if (!contains(used, x)) {
      used.push_back(x);
      return x;
    }
  }
}

void sorted_insert(std::vector<EntityIndex>& v, EntityIndex x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

bool inputs_present(const Rule& rule, const EntityTuple& sigma) {
  return std::all_of(rule.inputs.begin(), rule.inputs.end(),
                     [&](EntityIndex i) { return sigma[i] == kPresent; });
}

std::optional<RuleId> first_active(const RuleTable& table, std::span<const RuleId> ids,
                                   const EntityTuple& sigma) {
  for (auto id : ids) {
    if (inputs_present(table[id], sigma)) return id;
  }
  return std::nullopt;
}

void check_tuple(const RuleTable& table, const EntityTuple& sigma) {
  if (sigma.size() != table.capacity()) {
    fail(ErrorCode::InvalidParameter,
         fmt::format("entity tuple has length {}, rule table capacity is {}", sigma.size(), table.capacity()));
  }
}

template <class Producer, class Destroyer>
EventBatch compose_update(const RuleTable& table, const EntityTuple& sigma, Rng& rng, Tick tick,
                          Producer lowest_producer, Destroyer lowest_destroyer) {
  const auto& params = table.params();
  const auto n = static_cast<EntityIndex>(sigma.size());
  std::vector<std::optional<Cause>> minus(n);
  std::vector<std::optional<Cause>> plus(n);

  for (EntityIndex j = 0; j < n; ++j) {
    if (sigma[j] != kPresent) continue;
    if (auto r = lowest_destroyer(j)) minus[j] = Cause::by_rule(*r);
  }
  for (EntityIndex j = 0; j < n; ++j) {
    if (sigma[j] == kPresent && !minus[j] && params.decays(j) && rng.bernoulli(params.lambda)) {
      minus[j] = Cause::decay();
    }
  }
  for (EntityIndex j = 0; j < n; ++j) {
    if (sigma[j] != kPresent) {
      if (auto r = lowest_producer(j)) plus[j] = Cause::by_rule(*r);
    }
  }
  for (EntityIndex j = 0; j < n; ++j) {
    if (sigma[j] != kPresent && !plus[j] && rng.bernoulli(params.p_plus)) plus[j] = Cause::spontaneous();
  }

  EventBatch batch;
  batch.tick = tick;
  for (EntityIndex j = 0; j < n; ++j) {
    if (sigma[j] == kPresent) {
      if (minus[j]) batch.destroyed.push_back({j, *minus[j]});
    } else if (plus[j] && !lowest_destroyer(j)) {
      // Absent and targeted by an active destructive rule: destruction wins.
      batch.created.push_back({j, *plus[j]});
    }
  }
  return batch;
}

}  // namespace

InitialState sample_initial(std::size_t e, std::size_t n0, const RuleSchema& schema, double r_density,
                            Rng& rng, DynamicsParams params) {
  if (e == 0) fail(ErrorCode::InvalidParameter, "entity capacity must be positive");
  if (n0 > e) fail(ErrorCode::InvalidParameter, fmt::format("n0 = {} exceeds e = {}", n0, e));
  if (!(r_density >= 0.0) || !std::isfinite(r_density)) {
    fail(ErrorCode::InvalidParameter, "r_density must be a finite non-negative number");
  }
  if (schema.arity >= e) {
    fail(ErrorCode::InvalidParameter,
         fmt::format("arity {} leaves no room for a distinct output among {} entities", schema.arity, e));
  }

  InitialState init{EntityTuple(e, kAbsent), RuleTable(e, params)};

  // Partial Fisher-Yates: the first n0 slots of the permutation are present.
  std::vector<EntityIndex> order(e);
  for (std::size_t i = 0; i < e; ++i) order[i] = static_cast<EntityIndex>(i);
  for (std::size_t k = 0; k < n0; ++k) {
    const auto j = k + rng.below(e - k);
    std::swap(order[k], order[j]);
    init.sigma[order[k]] = kPresent;
  }

  const auto per_kind = static_cast<std::size_t>(std::llround(r_density * static_cast<double>(e)));
  std::vector<EntityIndex> used;
  for (auto kind : {RuleKind::Productive, RuleKind::Destructive}) {
    if (!schema.allows(kind)) continue;
    for (std::size_t r = 0; r < per_kind; ++r) {
      used.clear();
      for (std::uint32_t a = 0; a < schema.arity; ++a) draw_fresh(rng, e, used);
      const auto output = draw_fresh(rng, e, used);
      used.pop_back();
      init.table.add(schema.id, kind, used, output);
    }
  }
  return init;
}

std::vector<RuleId> active_rules(const RuleTable& table, const EntityTuple& sigma) {
  check_tuple(table, sigma);
  std::vector<RuleId> out;
  for (const auto& rule : table.rules()) {
    if (inputs_present(rule, sigma)) out.push_back(rule.id);
  }
  return out;
}

ActivityIndex::ActivityIndex(const RuleTable& table, const EntityTuple& sigma)
    : producers_(sigma.size(), 0), destroyers_(sigma.size(), 0), participation_(sigma.size(), 0) {
  check_tuple(table, sigma);
  missing_.reserve(table.size());
  for (const auto& rule : table.rules()) add_rule(rule, sigma);
}

void ActivityIndex::toggle(const Rule& rule, int delta) {
  auto bump = [delta](std::uint32_t& c) { c = static_cast<std::uint32_t>(static_cast<int>(c) + delta); };
  bump(rule.kind == RuleKind::Productive ? producers_[rule.output] : destroyers_[rule.output]);
  bump(participation_[rule.output]);
  for (auto i : rule.inputs) bump(participation_[i]);
}

void ActivityIndex::add_rule(const Rule& rule, const EntityTuple& sigma) {
  if (rule.id != missing_.size()) {
    fail(ErrorCode::InvalidRule, fmt::format("activity index expected rule {}, got {}", missing_.size(), rule.id));
  }
  std::uint32_t missing = 0;
  for (auto i : rule.inputs) missing += sigma[i] == kPresent ? 0 : 1;
  missing_.push_back(missing);
  if (missing == 0) toggle(rule, +1);
}

void ActivityIndex::set_state(const RuleTable& table, EntityIndex i, State from, State to) {
  if (from == to) return;
  if (to == kPresent) {
    for (auto id : table.by_input(i)) {
      if (--missing_[id] == 0) toggle(table[id], +1);
    }
  } else if (from == kPresent) {
    for (auto id : table.by_input(i)) {
      if (missing_[id]++ == 0) toggle(table[id], -1);
    }
  }
}

std::optional<RuleId> ActivityIndex::lowest_producer(const RuleTable& table, EntityIndex i) const {
  if (producers_[i] == 0) return std::nullopt;
  for (auto id : table.by_output(i)) {
    if (missing_[id] == 0) return id;
  }
  return std::nullopt;
}

std::optional<RuleId> ActivityIndex::lowest_destroyer(const RuleTable& table, EntityIndex i) const {
  if (destroyers_[i] == 0) return std::nullopt;
  for (auto id : table.by_target(i)) {
    if (missing_[id] == 0) return id;
  }
  return std::nullopt;
}

std::vector<RuleId> ActivityIndex::active_rules() const {
  std::vector<RuleId> out;
  for (std::size_t id = 0; id < missing_.size(); ++id) {
    if (missing_[id] == 0) out.push_back(static_cast<RuleId>(id));
  }
  return out;
}

std::size_t ActivityIndex::complexity(const EntityTuple& sigma) const noexcept {
  std::size_t n = 0;
  for (std::size_t i = 0; i < sigma.size(); ++i) {
    if (sigma[i] == kPresent && participation_[i] > 0) ++n;
  }
  return n;
}

UpdateResult apply_update(const RuleTable& table, const EntityTuple& sigma, Rng& rng, Tick tick) {
  check_tuple(table, sigma);
  auto batch = compose_update(
      table, sigma, rng, tick,
      [&](EntityIndex j) { return first_active(table, table.by_output(j), sigma); },
      [&](EntityIndex j) { return first_active(table, table.by_target(j), sigma); });
  UpdateResult result{sigma, std::move(batch)};
  for (const auto& d : result.batch.destroyed) result.sigma[d.entity] = kAbsent;
  for (const auto& c : result.batch.created) result.sigma[c.entity] = kPresent;
  return result;
}

EventBatch apply_update(const RuleTable& table, EntityTuple& sigma, ActivityIndex& activity, Rng& rng,
                        Tick tick) {
  check_tuple(table, sigma);
  auto batch = compose_update(
      table, sigma, rng, tick, [&](EntityIndex j) { return activity.lowest_producer(table, j); },
      [&](EntityIndex j) { return activity.lowest_destroyer(table, j); });
  for (const auto& d : batch.destroyed) {
    activity.set_state(table, d.entity, sigma[d.entity], kAbsent);
    sigma[d.entity] = kAbsent;
  }
  for (const auto& c : batch.created) {
    activity.set_state(table, c.entity, sigma[c.entity], kPresent);
    sigma[c.entity] = kPresent;
  }
  return batch;
}

void validate(const AdaptationPolicy& policy) {
  if (policy.rho_new < 0) fail(ErrorCode::InvalidParameter, "rho_new must be non-negative");
  if (!(policy.prod_share >= 0.0 && policy.prod_share <= 1.0)) {
    fail(ErrorCode::InvalidParameter, "prod_share must lie in [0, 1]");
  }
  if (!(policy.p_schema >= 0.0 && policy.p_schema <= 1.0)) {
    fail(ErrorCode::InvalidParameter, "p_schema must lie in [0, 1]");
  }
}

void apply_adaptation(RuleTable& table, Milieus& milieus, EventBatch& batch, const AdaptationPolicy& policy,
                      const SchemaRegistry& schemas, Rng& rng) {
  validate(policy);
  if (schemas.empty()) fail(ErrorCode::NoSchema, "no registered rule schema");
  if (batch.created.empty() || policy.rho_new == 0) return;

  const auto e = table.capacity();
  std::vector<const RuleSchema*> eligible[2];
  for (const auto& s : schemas.schemas()) {
    if (s.arity + 1 > e) continue;
    if (s.allows(RuleKind::Productive)) eligible[0].push_back(&s);
    if (s.allows(RuleKind::Destructive)) eligible[1].push_back(&s);
  }

  std::vector<EntityIndex> used;
  std::vector<EntityIndex> inputs;
  for (const auto& created : batch.created) {
    const auto novel = created.entity;
    for (int k = 0; k < policy.rho_new; ++k) {
      const auto kind = rng.bernoulli(policy.prod_share) ? RuleKind::Productive : RuleKind::Destructive;
      const auto& pool = eligible[kind == RuleKind::Productive ? 0 : 1];
      if (pool.empty()) fail(ErrorCode::NoSchema, "no registered schema admits the sampled rule kind");
      const auto& schema = *pool[rng.below(pool.size())];
      const auto slot = rng.below(schema.arity + 1);

      used.assign(1, novel);
      inputs.clear();
      EntityIndex output = novel;
      if (slot == schema.arity) {
        for (std::uint32_t a = 0; a < schema.arity; ++a) inputs.push_back(draw_fresh(rng, e, used));
      } else {
        inputs.push_back(novel);
        for (std::uint32_t a = 1; a < schema.arity; ++a) inputs.push_back(draw_fresh(rng, e, used));
        output = draw_fresh(rng, e, used);
      }
      const auto id = table.add(schema.id, kind, inputs, output);
      extend_milieus(milieus, table[id]);
      batch.rules_added.push_back({id, schema.id});
    }
  }
}

std::vector<EntityIndex> milieu_of(const RuleTable& table, EntityIndex i) {
  if (i >= table.capacity()) {
    fail(ErrorCode::IndexOutOfRange, fmt::format("entity {} outside [0, {})", i, table.capacity()));
  }
  std::vector<EntityIndex> out;
  for (auto id : table.by_input(i)) {
    for (auto j : table[id].inputs) {
      if (j != i) out.push_back(j);
    }
  }
  for (auto ids : {table.by_output(i), table.by_target(i)}) {
    for (auto id : ids) out.insert(out.end(), table[id].inputs.begin(), table[id].inputs.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Milieus milieus_of(const RuleTable& table) {
  Milieus m(table.capacity());
  for (const auto& rule : table.rules()) extend_milieus(m, rule);
  return m;
}

void extend_milieus(Milieus& milieus, const Rule& rule) {
  for (auto a : rule.inputs) {
    for (auto b : rule.inputs) {
      if (a != b) sorted_insert(milieus[a], b);
    }
    sorted_insert(milieus[rule.output], a);
  }
}

}  // namespace oee
