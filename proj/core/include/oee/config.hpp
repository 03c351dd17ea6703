#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "oee/schema.hpp"
#include "oee/stats.hpp"

namespace oee {

struct RunConfig {
  std::size_t e = 200;
  std::size_t env_e = 20;
  std::size_t n0 = 20;
  double r_density = 2.0;
  double lambda = 0.02;
  double p_plus = 0.0005;
  int rho_new = 4;
  double prod_share = 0.6;
  double p_schema = 1e-4;
  std::uint64_t seed = 0;
  std::uint64_t ticks = 10000;
  bool env_decay = false;
  KindAllowed seed_schema_kind = KindAllowed::Both;
  std::uint32_t seed_arity = 2;

  std::size_t window = 50;
  std::optional<double> theta;  // unset means 0.1 * e
  double epsilon = 0.01;
  std::size_t freeze_horizon = 100;

  std::string out;  // output directory; not part of the run's identity

  DetectorParams detector() const { return {window, theta ? *theta : 0.1 * static_cast<double>(e), epsilon}; }
  double quiet_baseline() const { return epsilon * static_cast<double>(e); }

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

// Throws InvalidConfig naming the first violated constraint.
void validate(const RunConfig& config);

// Every settable key, in serialization order.
const std::vector<std::string_view>& config_keys();

// Sets one field from its textual form; throws InvalidConfig for unknown keys
// or unparsable values. Keys match the config file (e.g. "p_plus").
void set_field(RunConfig& config, std::string_view key, std::string_view value);

// Flat `key = value` text, one field per line in a fixed order. `out` is
// emitted only when include_out is set.
std::string to_text(const RunConfig& config, bool include_out = true);

// Parses on top of `base`: unknown keys and malformed lines are errors,
// absent keys keep the base value. '#' starts a comment line.
RunConfig parse_config(std::string_view text, RunConfig base = {});

}  // namespace oee
