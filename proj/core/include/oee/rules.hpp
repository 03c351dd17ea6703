#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oee/schema.hpp"
#include "oee/types.hpp"

namespace oee {

// A combinatorial law: when every input entity is present, a productive rule
// creates `output`, a destructive rule removes it. Inputs are stored sorted.
struct Rule {
  RuleId id = 0;
  SchemaId schema = 0;
  RuleKind kind = RuleKind::Productive;
  std::vector<EntityIndex> inputs;
  EntityIndex output = 0;

  friend bool operator==(const Rule&, const Rule&) = default;
};

// Global parameters of the update function that are not rules.
struct DynamicsParams {
  double lambda = 0.0;  // decay probability per present entity per tick
  double p_plus = 0.0;  // spontaneous creation probability per absent entity per tick
  // Entities [0, env_e) model the environment. They decay only when env_decay is set.
  std::size_t env_e = 0;
  bool env_decay = false;

  bool decays(EntityIndex i) const noexcept { return env_decay || i >= env_e; }

  friend bool operator==(const DynamicsParams&, const DynamicsParams&) = default;
};

// The content of the update function: an append-only, id-indexed rule list
// plus per-entity indexes. Rules are immutable once added and ids are dense,
// so the table as of any earlier moment is a prefix of the current one.
class RuleTable {
 public:
  explicit RuleTable(std::size_t capacity = 0, DynamicsParams params = {});

  // Validates the rule invariants, assigns the next id and indexes the rule.
  RuleId add(SchemaId schema, RuleKind kind, std::vector<EntityIndex> inputs, EntityIndex output);

  std::size_t capacity() const noexcept { return capacity_; }
  std::size_t size() const noexcept { return rules_.size(); }
  bool empty() const noexcept { return rules_.empty(); }
  bool contains(RuleId id) const noexcept { return id < rules_.size(); }

  const Rule& at(RuleId id) const;
  const Rule& operator[](RuleId id) const noexcept { return rules_[id]; }
  std::span<const Rule> rules() const noexcept { return rules_; }

  // Productive rules creating i, destructive rules removing i, and rules
  // reading i as an input. Each list is in ascending id order.
  std::span<const RuleId> by_output(EntityIndex i) const noexcept { return by_output_[i]; }
  std::span<const RuleId> by_target(EntityIndex i) const noexcept { return by_target_[i]; }
  std::span<const RuleId> by_input(EntityIndex i) const noexcept { return by_input_[i]; }

  const DynamicsParams& params() const noexcept { return params_; }

  std::size_t count(RuleKind kind) const noexcept;

  friend bool operator==(const RuleTable& a, const RuleTable& b) {
    return a.capacity_ == b.capacity_ && a.params_ == b.params_ && a.rules_ == b.rules_;
  }

 private:
  std::size_t capacity_;
  DynamicsParams params_;
  std::vector<Rule> rules_;
  std::vector<std::vector<RuleId>> by_output_;
  std::vector<std::vector<RuleId>> by_target_;
  std::vector<std::vector<RuleId>> by_input_;
};

void validate(const DynamicsParams& params, std::size_t capacity);

// Canonical text form. Header lines `key=value`, then one rule per line in id
// order: `P|D <id> <schema_id> <inputs,comma-separated> -> <output>`.
std::string to_text(const RuleTable& table);
RuleTable rule_table_from_text(std::string_view text);

std::string format_double(double value);

}  // namespace oee
