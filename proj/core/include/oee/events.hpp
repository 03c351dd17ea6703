#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "oee/types.hpp"

namespace oee {

enum class CauseKind : std::uint8_t { Rule, Spontaneous, Decay };

struct Cause {
  CauseKind kind = CauseKind::Spontaneous;
  RuleId rule = 0;  // meaningful only for CauseKind::Rule

  static Cause by_rule(RuleId id) { return {CauseKind::Rule, id}; }
  static Cause spontaneous() { return {CauseKind::Spontaneous, 0}; }
  static Cause decay() { return {CauseKind::Decay, 0}; }

  friend bool operator==(const Cause&, const Cause&) = default;
};

// "rule:<id>", "spontaneous" or "decay".
std::string to_string(const Cause& cause);
Cause parse_cause(std::string_view text);

struct EntityChange {
  EntityIndex entity = 0;
  Cause cause;
  friend bool operator==(const EntityChange&, const EntityChange&) = default;
};

struct RuleAddition {
  RuleId rule = 0;
  SchemaId schema = 0;
  friend bool operator==(const RuleAddition&, const RuleAddition&) = default;
};

// Everything that changed during one tick. Lists are sorted by entity or id.
struct EventBatch {
  Tick tick = 0;
  std::vector<EntityChange> created;
  std::vector<EntityChange> destroyed;
  std::vector<RuleAddition> rules_added;
  std::vector<SchemaId> schemas_added;

  std::size_t events_total() const noexcept { return created.size() + destroyed.size(); }
  bool empty() const noexcept {
    return created.empty() && destroyed.empty() && rules_added.empty() && schemas_added.empty();
  }

  friend bool operator==(const EventBatch&, const EventBatch&) = default;
};

enum class EventKind : std::uint8_t { Created, Destroyed, RuleAdded, SchemaAdded };

std::string_view to_string(EventKind kind) noexcept;
EventKind parse_event_kind(std::string_view text);

// A single entry of a batch. `subject` is the entity for Created/Destroyed,
// the rule id for RuleAdded and the schema id for SchemaAdded.
struct Event {
  EventKind kind = EventKind::Created;
  std::uint32_t subject = 0;
  Cause cause;          // Created, Destroyed
  SchemaId schema = 0;  // RuleAdded

  friend bool operator==(const Event&, const Event&) = default;
};

// Canonical order: created, destroyed, rules_added, schemas_added.
std::vector<Event> flatten(const EventBatch& batch);

// One JSON object per batch, fields in canonical order.
nlohmann::ordered_json to_json(const EventBatch& batch);
EventBatch batch_from_json(const nlohmann::json& j);

}  // namespace oee
