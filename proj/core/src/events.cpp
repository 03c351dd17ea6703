#include "oee/events.hpp"

#include <charconv>

#include "oee/error.hpp"

namespace oee {

std::string to_string(const Cause& cause) {
  switch (cause.kind) {
    case CauseKind::Rule: return "rule:" + std::to_string(cause.rule);
    case CauseKind::Spontaneous: return "spontaneous";
    case CauseKind::Decay: return "decay";
  }
  return "?";
}

Cause parse_cause(std::string_view text) {
  if (text == "spontaneous") return Cause::spontaneous();
  if (text == "decay") return Cause::decay();
  if (text.starts_with("rule:")) {
    const auto digits = text.substr(5);
    RuleId id = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
    if (ec == std::errc{} && ptr == digits.data() + digits.size() && !digits.empty()) {
      return Cause::by_rule(id);
    }
  }
  fail(ErrorCode::ParseError, "bad cause '" + std::string(text) + "'");
}

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::Created: return "created";
    case EventKind::Destroyed: return "destroyed";
    case EventKind::RuleAdded: return "rule_added";
    case EventKind::SchemaAdded: return "schema_added";
  }
  return "?";
}

EventKind parse_event_kind(std::string_view text) {
  if (text == "created") return EventKind::Created;
  if (text == "destroyed") return EventKind::Destroyed;
  if (text == "rule_added") return EventKind::RuleAdded;
  if (text == "schema_added") return EventKind::SchemaAdded;
  fail(ErrorCode::ParseError, "bad event kind '" + std::string(text) + "'");
}

std::vector<Event> flatten(const EventBatch& batch) {
  std::vector<Event> out;
  out.reserve(batch.created.size() + batch.destroyed.size() + batch.rules_added.size() +
              batch.schemas_added.size());
  for (const auto& c : batch.created) out.push_back({EventKind::Created, c.entity, c.cause, 0});
  for (const auto& d : batch.destroyed) out.push_back({EventKind::Destroyed, d.entity, d.cause, 0});
  for (const auto& r : batch.rules_added) out.push_back({EventKind::RuleAdded, r.rule, {}, r.schema});
  for (auto s : batch.schemas_added) out.push_back({EventKind::SchemaAdded, s, {}, 0});
  return out;
}

nlohmann::ordered_json to_json(const EventBatch& batch) {
  auto changes = [](const std::vector<EntityChange>& list) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : list) {
      arr.push_back(nlohmann::ordered_json{{"entity", c.entity}, {"cause", to_string(c.cause)}});
    }
    return arr;
  };
  auto rules = nlohmann::ordered_json::array();
  for (const auto& r : batch.rules_added) {
    rules.push_back(nlohmann::ordered_json{{"rule", r.rule}, {"schema", r.schema}});
  }
  nlohmann::ordered_json j;
  j["tick"] = batch.tick;
  j["created"] = changes(batch.created);
  j["destroyed"] = changes(batch.destroyed);
  j["rules_added"] = std::move(rules);
  j["schemas_added"] = batch.schemas_added;
  return j;
}

EventBatch batch_from_json(const nlohmann::json& j) {
  try {
    EventBatch batch;
    batch.tick = j.at("tick").get<Tick>();
    for (const auto& c : j.at("created")) {
      batch.created.push_back({c.at("entity").get<EntityIndex>(), parse_cause(c.at("cause").get<std::string>())});
    }
    for (const auto& d : j.at("destroyed")) {
      batch.destroyed.push_back({d.at("entity").get<EntityIndex>(), parse_cause(d.at("cause").get<std::string>())});
    }
    for (const auto& r : j.at("rules_added")) {
      batch.rules_added.push_back({r.at("rule").get<RuleId>(), r.at("schema").get<SchemaId>()});
    }
    batch.schemas_added = j.at("schemas_added").get<std::vector<SchemaId>>();
    return batch;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::CorruptLog, std::string("malformed event batch: ") + e.what());
  }
}

}  // namespace oee
