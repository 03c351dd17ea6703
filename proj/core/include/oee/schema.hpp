#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oee/rng.hpp"
#include "oee/types.hpp"

namespace oee {

enum class RuleKind : std::uint8_t { Productive, Destructive };
enum class KindAllowed : std::uint8_t { Productive, Destructive, Both };

std::string_view to_string(KindAllowed k) noexcept;
KindAllowed parse_kind_allowed(std::string_view text);

// A rule shape in the modifiable metamodel layer.
struct RuleSchema {
  SchemaId id = 0;
  KindAllowed kind_allowed = KindAllowed::Both;
  std::uint32_t arity = 2;
  // Empty for seed schemas, the birth tick for schemas created by genesis.
  std::optional<Tick> genesis_tick;

  bool allows(RuleKind kind) const noexcept;
  bool is_seed() const noexcept { return !genesis_tick.has_value(); }

  friend bool operator==(const RuleSchema&, const RuleSchema&) = default;
};

// Append-only registry of rule schemas. Seed schemas can only be added while
// no genesis schema exists; ids are dense and start at 0.
class SchemaRegistry {
 public:
  SchemaRegistry() = default;

  // The default seed layer: one pairwise schema admitting both rule kinds.
  static SchemaRegistry with_seed(KindAllowed kind = KindAllowed::Both, std::uint32_t arity = 2);

  const RuleSchema& add_seed(KindAllowed kind, std::uint32_t arity);
  const RuleSchema& add_genesis(KindAllowed kind, std::uint32_t arity, Tick tick);

  std::size_t size() const noexcept { return schemas_.size(); }
  bool empty() const noexcept { return schemas_.empty(); }
  bool contains(SchemaId id) const noexcept { return id < schemas_.size(); }
  const RuleSchema& at(SchemaId id) const;
  const std::vector<RuleSchema>& schemas() const noexcept { return schemas_; }
  std::uint32_t max_arity() const noexcept;

  friend bool operator==(const SchemaRegistry&, const SchemaRegistry&) = default;

 private:
  std::vector<RuleSchema> schemas_;
};

// Line format, one schema per line, sorted by id:
//   S <id> <both|productive|destructive> <arity> seed
//   S <id> <both|productive|destructive> <arity> genesis <tick>
std::string to_text(const SchemaRegistry& registry);
SchemaRegistry schema_registry_from_text(std::string_view text);

// With probability p_schema (one uniform draw, always consumed) registers a
// new schema one arity above the current maximum, admitting both kinds.
std::optional<RuleSchema> genesis_schema(SchemaRegistry& registry, double p_schema, Rng& rng,
                                         Tick tick);

// The two metamodel layers. The fixed layer is the set of building blocks
// every model is made of and has no mutators; the modifiable layer is the
// schema registry, which only grows.
struct MetamodelLayers {
  static const std::vector<std::string_view>& fixed_building_blocks();
  static std::string fixed_descriptor();

  SchemaRegistry modifiable;
};

}  // namespace oee
