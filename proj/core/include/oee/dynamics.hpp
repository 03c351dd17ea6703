#pragma once

#include <optional>
#include <vector>

#include "oee/events.hpp"
#include "oee/rng.hpp"
#include "oee/rules.hpp"
#include "oee/schema.hpp"
#include "oee/types.hpp"

namespace oee {

struct InitialState {
  EntityTuple sigma;
  RuleTable table;
};

// Draws an initial entity tuple with exactly n0 present entities and
// round(r_density * e) rules of each kind the schema admits. Every rule
// instantiates `schema`; inputs and output are uniform under the rule
// invariants.
InitialState sample_initial(std::size_t e, std::size_t n0, const RuleSchema& schema, double r_density,
                            Rng& rng, DynamicsParams params = {});

// Ids (ascending) of the rules whose inputs are all present.
std::vector<RuleId> active_rules(const RuleTable& table, const EntityTuple& sigma);

// Incrementally maintained view of which rules are active for the current
// entity tuple, plus per-entity counts of active producers, destroyers and
// participations. Must be told about every state change and every new rule.
class ActivityIndex {
 public:
  ActivityIndex() = default;
  ActivityIndex(const RuleTable& table, const EntityTuple& sigma);

  void add_rule(const Rule& rule, const EntityTuple& sigma);
  void set_state(const RuleTable& table, EntityIndex i, State from, State to);

  bool is_active(RuleId id) const noexcept { return missing_[id] == 0; }
  std::optional<RuleId> lowest_producer(const RuleTable& table, EntityIndex i) const;
  std::optional<RuleId> lowest_destroyer(const RuleTable& table, EntityIndex i) const;
  bool participates(EntityIndex i) const noexcept { return participation_[i] > 0; }

  std::vector<RuleId> active_rules() const;
  // Present entities that are an input or the output of at least one active rule.
  std::size_t complexity(const EntityTuple& sigma) const noexcept;

  friend bool operator==(const ActivityIndex&, const ActivityIndex&) = default;

 private:
  void toggle(const Rule& rule, int delta);

  std::vector<std::uint32_t> missing_;  // absent inputs per rule
  std::vector<std::uint32_t> producers_;
  std::vector<std::uint32_t> destroyers_;
  std::vector<std::uint32_t> participation_;
};

struct UpdateResult {
  EntityTuple sigma;
  EventBatch batch;
};

// One synchronous application of the update function, computed from sigma(t)
// only:
//   P+ : absent entities that are the output of an active productive rule,
//        or, failing that, appear spontaneously with probability p_plus;
//   D- : entities targeted by an active destructive rule, and present
//        entities that decay with probability lambda.
// An entity in D- ends absent, one in P+ \ D- ends present, all others keep
// their state. Rule causes name the lowest active rule id. Draw order is all
// decay draws (ascending entity) then all spontaneous draws.
UpdateResult apply_update(const RuleTable& table, const EntityTuple& sigma, Rng& rng, Tick tick = 0);

// Same update, in place, answering activity queries from `activity` instead
// of rescanning rule inputs. Consumes the identical draws.
EventBatch apply_update(const RuleTable& table, EntityTuple& sigma, ActivityIndex& activity, Rng& rng,
                        Tick tick);

struct AdaptationPolicy {
  int rho_new = 4;          // rules sampled per newly created entity
  double prod_share = 0.6;  // probability that a sampled rule is productive
  double p_schema = 0.0;    // per-tick schema genesis probability

  friend bool operator==(const AdaptationPolicy&, const AdaptationPolicy&) = default;
};

void validate(const AdaptationPolicy& policy);

// Co-evolves interactions with this tick's novelties: for each created entity
// (ascending) samples rho_new rules that involve it as an input or as the
// output, appends them to the table, extends the milieus, and records them
// in batch.rules_added. Schemas whose arity leaves no room for distinct
// inputs and output are skipped.
void apply_adaptation(RuleTable& table, Milieus& milieus, EventBatch& batch, const AdaptationPolicy& policy,
                      const SchemaRegistry& schemas, Rng& rng);

// Sorted union of the co-inputs of rules reading i and the inputs of rules
// producing or removing i.
std::vector<EntityIndex> milieu_of(const RuleTable& table, EntityIndex i);
Milieus milieus_of(const RuleTable& table);
void extend_milieus(Milieus& milieus, const Rule& rule);

}  // namespace oee
