#include "oee/novelty.hpp"

#include <charconv>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "oee/error.hpp"

namespace oee {

std::string_view to_string(NoveltyClass c) noexcept {
  switch (c) {
    case NoveltyClass::Exploratory: return "exploratory";
    case NoveltyClass::Expansive: return "expansive";
    case NoveltyClass::Transformational: return "transformational";
  }
  return "?";
}

NoveltyClass parse_novelty_class(std::string_view text) {
  if (text == "exploratory") return NoveltyClass::Exploratory;
  if (text == "expansive") return NoveltyClass::Expansive;
  if (text == "transformational") return NoveltyClass::Transformational;
  fail(ErrorCode::ParseError, "bad novelty class '" + std::string(text) + "'");
}

MetamodelSnapshot snapshot_of(const RuleTable& table, const SchemaRegistry& schemas) noexcept {
  return {table.size(), schemas.size()};
}

NoveltyClass classify_event(const Event& event, const MetamodelSnapshot& before, const MetamodelSnapshot& after) {
  switch (event.kind) {
    case EventKind::Created:
    case EventKind::Destroyed:
      if (event.cause.kind == CauseKind::Rule && event.cause.rule >= before.rules) {
        fail(ErrorCode::UnknownRule, fmt::format("rule {} is not part of the pre-tick model", event.cause.rule));
      }
      return NoveltyClass::Exploratory;
    case EventKind::RuleAdded:
      if (event.subject < before.rules || event.subject >= after.rules) {
        fail(ErrorCode::UnknownRule, fmt::format("rule {} was not added this tick", event.subject));
      }
      if (event.schema < before.schemas) return NoveltyClass::Expansive;
      if (event.schema < after.schemas) return NoveltyClass::Transformational;
      fail(ErrorCode::UnknownSchema, fmt::format("schema {}", event.schema));
    case EventKind::SchemaAdded:
      if (event.subject < before.schemas || event.subject >= after.schemas) {
        fail(ErrorCode::UnknownSchema, fmt::format("schema {} was not added this tick", event.subject));
      }
      return NoveltyClass::Transformational;
  }
  fail(ErrorCode::ParseError, "unknown event kind");
}

std::vector<NoveltyClass> classify_batch(const EventBatch& batch, const MetamodelSnapshot& before,
                                         const MetamodelSnapshot& after) {
  std::vector<NoveltyClass> out;
  for (const auto& event : flatten(batch)) out.push_back(classify_event(event, before, after));
  return out;
}

std::uint64_t& NoveltyCounts::operator[](NoveltyClass c) noexcept {
  switch (c) {
    case NoveltyClass::Exploratory: return exploratory;
    case NoveltyClass::Expansive: return expansive;
    case NoveltyClass::Transformational: break;
  }
  return transformational;
}

std::optional<Tick> Ledger::last_tick() const noexcept {
  if (records_.empty()) return std::nullopt;
  return records_.back().tick;
}

void Ledger::append(const LedgerRecord& record) {
  if (auto last = last_tick(); last && record.tick < *last) {
    fail(ErrorCode::TickRegression, fmt::format("tick {} after tick {}", record.tick, *last));
  }
  records_.push_back(record);
  ++counts_[record.novelty];
}

void ledger_append(Ledger& ledger, Tick tick, const EventBatch& batch,
                   std::span<const NoveltyClass> classifications) {
  if (auto last = ledger.last_tick(); last && tick < *last) {
    fail(ErrorCode::TickRegression, fmt::format("tick {} after tick {}", tick, *last));
  }
  const auto events = flatten(batch);
  if (events.size() != classifications.size()) {
    fail(ErrorCode::InvalidParameter,
         fmt::format("{} events but {} classifications", events.size(), classifications.size()));
  }
  for (std::size_t i = 0; i < events.size(); ++i) ledger.append({tick, events[i], classifications[i]});
}

NoveltyCounts novelty_counts(const Ledger& ledger, Tick t0, Tick t1) {
  if (t0 > t1) fail(ErrorCode::InvalidParameter, "window start after window end");
  NoveltyCounts counts;
  for (const auto& r : ledger.records()) {
    if (r.tick >= t0 && r.tick <= t1) ++counts[r.novelty];
  }
  return counts;
}

namespace {

std::string cause_field(const Event& e) {
  switch (e.kind) {
    case EventKind::Created:
    case EventKind::Destroyed: return to_string(e.cause);
    case EventKind::RuleAdded: return "schema:" + std::to_string(e.schema);
    case EventKind::SchemaAdded: return "genesis";
  }
  return "?";
}

}  // namespace

std::string to_jsonl(const Ledger& ledger) {
  std::string out;
  for (const auto& r : ledger.records()) {
    nlohmann::ordered_json j;
    j["tick"] = r.tick;
    j["event_kind"] = to_string(r.event.kind);
    j["entity_or_rule_id"] = r.event.subject;
    j["cause"] = cause_field(r.event);
    j["class"] = to_string(r.novelty);
    out += j.dump();
    out += '\n';
  }
  return out;
}

Ledger ledger_from_jsonl(std::string_view text) {
  Ledger ledger;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      LedgerRecord r;
      r.tick = j.at("tick").get<Tick>();
      r.event.kind = parse_event_kind(j.at("event_kind").get<std::string>());
      r.event.subject = j.at("entity_or_rule_id").get<std::uint32_t>();
      const auto cause = j.at("cause").get<std::string>();
      switch (r.event.kind) {
        case EventKind::Created:
        case EventKind::Destroyed: r.event.cause = parse_cause(cause); break;
        case EventKind::RuleAdded: {
          if (!cause.starts_with("schema:")) fail(ErrorCode::CorruptLog, "bad rule cause: " + line);
          const auto digits = std::string_view(cause).substr(7);
          auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), r.event.schema);
          if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
            fail(ErrorCode::CorruptLog, "bad rule cause: " + line);
          }
          break;
        }
        case EventKind::SchemaAdded:
          if (cause != "genesis") fail(ErrorCode::CorruptLog, "bad schema cause: " + line);
          break;
      }
      r.novelty = parse_novelty_class(j.at("class").get<std::string>());
      ledger.append(r);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorCode::CorruptLog, std::string("malformed ledger line: ") + e.what());
    } catch (const Error& e) {
      if (e.code() == ErrorCode::TickRegression) throw;
      fail(ErrorCode::CorruptLog, e.what());
    }
  }
  return ledger;
}

}  // namespace oee
