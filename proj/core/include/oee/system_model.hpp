#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "oee/dynamics.hpp"
#include "oee/events.hpp"
#include "oee/rng.hpp"
#include "oee/rules.hpp"
#include "oee/schema.hpp"
#include "oee/types.hpp"

namespace oee {

// Optional objective. Open-ended runs leave it unset; it exists so the
// building-block set is complete.
struct Target {
  std::string name;
  std::function<double(const EntityTuple&)> objective;

  friend bool operator==(const Target& a, const Target& b) { return a.name == b.name; }
};

// The adaptation function: how interactions co-evolve with new entities
// (policy) and the schemas new rules are drawn from.
struct AdaptationFunction {
  AdaptationPolicy policy;
  SchemaRegistry schemas;

  friend bool operator==(const AdaptationFunction&, const AdaptationFunction&) = default;
};

// Any subset of the parameters that individuate a model.
struct ParameterAssignment {
  std::optional<std::size_t> capacity;
  std::optional<EntityTuple> entities;
  std::optional<RuleTable> update;
  std::optional<AdaptationFunction> adaptation;
  std::optional<Target> target;
  std::optional<std::uint64_t> seed;
};

// A system model moving through the virtual -> metastable -> actual
// lifecycle. Only an actual model can be stepped. Observers never mutate.
class SystemModel {
 public:
  explicit SystemModel(StateSet states);

  Regime regime() const noexcept { return regime_; }
  const StateSet& state_set() const noexcept { return states_; }
  Tick tick() const noexcept { return tick_; }

  // Observers return nullptr while the field is unassigned.
  const std::size_t* capacity() const noexcept { return capacity_ ? &*capacity_ : nullptr; }
  const EntityTuple* entities() const noexcept { return entities_ ? &*entities_ : nullptr; }
  const RuleTable* rules() const noexcept { return update_ ? &*update_ : nullptr; }
  const AdaptationFunction* adaptation() const noexcept { return adaptation_ ? &*adaptation_ : nullptr; }
  const Target* target() const noexcept { return target_ ? &*target_ : nullptr; }
  const std::uint64_t* seed() const noexcept { return seed_ ? &*seed_ : nullptr; }
  const Milieus* milieus() const noexcept { return regime_ == Regime::Actual ? &milieus_ : nullptr; }
  const Rng* rng() const noexcept { return regime_ == Regime::Actual ? &rng_ : nullptr; }
  const ActivityIndex* activity() const noexcept { return regime_ == Regime::Actual ? &activity_ : nullptr; }

  // Assigns fields; equal re-assignment is a no-op. Strong guarantee: on
  // error the model is unchanged.
  void concretise(const ParameterAssignment& params);

  // Applies the update function then the adaptation function (rule sampling
  // for this tick's novelties, then schema genesis) and returns the batch.
  EventBatch step();

  // Present entities participating in at least one active rule.
  std::size_t complexity() const;

  friend bool operator==(const SystemModel& a, const SystemModel& b);
  friend SystemModel system_model_from_text(std::string_view text, const RuleTable* rules,
                                            const SchemaRegistry* schemas);

 private:
  void check_consistency(const ParameterAssignment& params) const;
  void become_actual();

  StateSet states_;
  Regime regime_ = Regime::Virtual;
  std::optional<std::size_t> capacity_;
  std::optional<EntityTuple> entities_;
  std::optional<RuleTable> update_;
  std::optional<AdaptationFunction> adaptation_;
  std::optional<Target> target_;
  std::optional<std::uint64_t> seed_;

  // Derived once actual.
  Tick tick_ = 0;
  Milieus milieus_;
  ActivityIndex activity_;
  Rng rng_;
};

SystemModel new_system_model(StateSet states);
SystemModel concretise(SystemModel model, const ParameterAssignment& params);
std::pair<SystemModel, EventBatch> step(SystemModel model);
Regime regime_of(const SystemModel& model);

// Structured-text document with [sections] of `key = value` lines. The rule
// table and schema registry are referenced by SHA-256 digest of their
// canonical text, not inlined.
std::string to_text(const SystemModel& model);
SystemModel system_model_from_text(std::string_view text, const RuleTable* rules,
                                   const SchemaRegistry* schemas);

}  // namespace oee
