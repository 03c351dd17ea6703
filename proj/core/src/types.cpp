#include "oee/types.hpp"

#include <algorithm>
#include <string>

#include "oee/error.hpp"

namespace oee {

StateSet StateSet::make(std::vector<State> states) {
  if (states.size() < 2) {
    fail(ErrorCode::InvalidStateSet, "a state set needs at least two states");
  }
  auto sorted = states;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    fail(ErrorCode::InvalidStateSet, "duplicate state");
  }
  return StateSet(std::move(states));
}

bool StateSet::contains(State s) const noexcept {
  return std::find(states_.begin(), states_.end(), s) != states_.end();
}

bool StateSet::is_binary() const noexcept {
  return k() == 2 && contains(kAbsent) && contains(kPresent);
}

std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::Virtual: return "virtual";
    case Regime::Metastable: return "metastable";
    case Regime::Actual: return "actual";
  }
  return "?";
}

Regime parse_regime(std::string_view text) {
  if (text == "virtual") return Regime::Virtual;
  if (text == "metastable") return Regime::Metastable;
  if (text == "actual") return Regime::Actual;
  fail(ErrorCode::ParseError, "unknown regime '" + std::string(text) + "'");
}

std::size_t count_present(const EntityTuple& sigma) noexcept {
  return static_cast<std::size_t>(std::count(sigma.begin(), sigma.end(), kPresent));
}

}  // namespace oee
