#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace oee {

using State = std::uint8_t;
using EntityIndex = std::uint32_t;
using RuleId = std::uint32_t;
using SchemaId = std::uint32_t;
using Tick = std::uint64_t;

inline constexpr State kAbsent = 0;
inline constexpr State kPresent = 1;

// Admissible entity states. At least two, all distinct, kept in the order
// they were given.
class StateSet {
 public:
  static StateSet make(std::vector<State> states);
  static StateSet binary() { return make({kAbsent, kPresent}); }

  std::size_t k() const noexcept { return states_.size(); }
  const std::vector<State>& states() const noexcept { return states_; }
  bool contains(State s) const noexcept;
  bool is_binary() const noexcept;

  friend bool operator==(const StateSet&, const StateSet&) = default;

 private:
  explicit StateSet(std::vector<State> states) : states_(std::move(states)) {}
  std::vector<State> states_;
};

// Entity tuple: one state per entity, fixed length e for the whole run.
using EntityTuple = std::vector<State>;

// Per-entity sorted neighbour lists.
using Milieus = std::vector<std::vector<EntityIndex>>;

enum class Regime { Virtual, Metastable, Actual };

std::string_view to_string(Regime r) noexcept;
Regime parse_regime(std::string_view text);

std::size_t count_present(const EntityTuple& sigma) noexcept;

}  // namespace oee
