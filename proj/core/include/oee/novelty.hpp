#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oee/events.hpp"
#include "oee/rules.hpp"
#include "oee/schema.hpp"

namespace oee {

enum class NoveltyClass : std::uint8_t { Exploratory, Expansive, Transformational };

std::string_view to_string(NoveltyClass c) noexcept;
NoveltyClass parse_novelty_class(std::string_view text);

// Rule table and schema registry are append-only with dense ids, so the
// model and metamodel as of any moment are fully described by their sizes.
struct MetamodelSnapshot {
  std::size_t rules = 0;
  std::size_t schemas = 0;

  friend bool operator==(const MetamodelSnapshot&, const MetamodelSnapshot&) = default;
};

MetamodelSnapshot snapshot_of(const RuleTable& table, const SchemaRegistry& schemas) noexcept;

// Exploratory  : entity created/destroyed by a pre-existing rule, by decay or
//                spontaneously; the current model already describes it.
// Expansive    : a new rule instantiating a schema that existed before the tick.
// Transformational : a new schema, or a new rule under a schema born this tick.
// `before` is the pre-tick state, `after` the post-tick state; references
// outside them raise UnknownRule / UnknownSchema.
NoveltyClass classify_event(const Event& event, const MetamodelSnapshot& before, const MetamodelSnapshot& after);

// All events of a batch in canonical (flatten) order.
std::vector<NoveltyClass> classify_batch(const EventBatch& batch, const MetamodelSnapshot& before,
                                         const MetamodelSnapshot& after);

struct NoveltyCounts {
  std::uint64_t exploratory = 0;
  std::uint64_t expansive = 0;
  std::uint64_t transformational = 0;

  std::uint64_t& operator[](NoveltyClass c) noexcept;
  std::uint64_t total() const noexcept { return exploratory + expansive + transformational; }
  friend bool operator==(const NoveltyCounts&, const NoveltyCounts&) = default;
};

struct LedgerRecord {
  Tick tick = 0;
  Event event;
  NoveltyClass novelty = NoveltyClass::Exploratory;

  friend bool operator==(const LedgerRecord&, const LedgerRecord&) = default;
};

// Append-only classified event history with running per-class counters.
class Ledger {
 public:
  const std::vector<LedgerRecord>& records() const noexcept { return records_; }
  const NoveltyCounts& counts() const noexcept { return counts_; }
  std::optional<Tick> last_tick() const noexcept;

  void append(const LedgerRecord& record);

  friend bool operator==(const Ledger&, const Ledger&) = default;

 private:
  std::vector<LedgerRecord> records_;
  NoveltyCounts counts_;
};

// Appends one record per event of `batch` in canonical order. The
// classifications must line up with flatten(batch).
void ledger_append(Ledger& ledger, Tick tick, const EventBatch& batch,
                   std::span<const NoveltyClass> classifications);

// Per-class counts of records with t0 <= tick <= t1.
NoveltyCounts novelty_counts(const Ledger& ledger, Tick t0, Tick t1);

// One JSON object per line: tick, event_kind, entity_or_rule_id, cause, class.
// The cause is "rule:<id>", "spontaneous" or "decay" for entity events,
// "schema:<id>" for added rules and "genesis" for added schemas.
std::string to_jsonl(const Ledger& ledger);
Ledger ledger_from_jsonl(std::string_view text);

}  // namespace oee
