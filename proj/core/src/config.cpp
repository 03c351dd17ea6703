#include "oee/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "oee/error.hpp"
#include "oee/rules.hpp"

namespace oee {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <class T>
T parse_integral(std::string_view key, std::string_view value) {
  T v{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc{} || ptr != value.data() + value.size() || value.empty()) {
    fail(ErrorCode::InvalidConfig, fmt::format("{}: '{}' is not a valid integer", key, value));
  }
  return v;
}

double parse_real(std::string_view key, std::string_view value) {
  const std::string s(value);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    fail(ErrorCode::InvalidConfig, fmt::format("{}: '{}' is not a valid number", key, value));
  }
  return v;
}

bool parse_switch(std::string_view key, std::string_view value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  fail(ErrorCode::InvalidConfig, fmt::format("{}: expected on|off, got '{}'", key, value));
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void validate(const RunConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) fail(ErrorCode::InvalidConfig, what);
  };
  require(c.e > 0, "e must be positive");
  require(c.env_e < c.e, "env_e must be smaller than e");
  require(c.n0 <= c.e, "n0 must not exceed e");
  require(c.r_density >= 0.0, "r_density must be non-negative");
  require(is_probability(c.lambda), "lambda must lie in [0, 1]");
  require(is_probability(c.p_plus), "p_plus must lie in [0, 1]");
  require(c.rho_new >= 0, "rho_new must be non-negative");
  require(is_probability(c.prod_share), "prod_share must lie in [0, 1]");
  require(is_probability(c.p_schema), "p_schema must lie in [0, 1]");
  require(c.ticks > 0, "ticks must be positive");
  require(c.seed_arity >= 1 && c.seed_arity < c.e, "seed_arity must lie in [1, e)");
  require(c.window >= 1, "window must be at least 1");
  require(!c.theta || *c.theta > 0.0, "theta must be positive");
  require(c.epsilon >= 0.0, "epsilon must be non-negative");
  require(c.freeze_horizon >= 1, "freeze_horizon must be at least 1");
}

const std::vector<std::string_view>& config_keys() {
  static const std::vector<std::string_view> keys{
      "e",         "env_e", "n0",         "r_density",        "lambda",     "p_plus", "rho_new",
      "prod_share", "p_schema", "seed",   "ticks",            "env_decay",  "seed_schema_kind", "seed_arity",
      "window",    "theta", "epsilon",    "freeze_horizon",   "out"};
  return keys;
}

void set_field(RunConfig& c, std::string_view key, std::string_view value) {
  value = trim(value);
  if (key == "e") c.e = parse_integral<std::size_t>(key, value);
  else if (key == "env_e") c.env_e = parse_integral<std::size_t>(key, value);
  else if (key == "n0") c.n0 = parse_integral<std::size_t>(key, value);
  else if (key == "r_density") c.r_density = parse_real(key, value);
  else if (key == "lambda") c.lambda = parse_real(key, value);
  else if (key == "p_plus") c.p_plus = parse_real(key, value);
  else if (key == "rho_new") c.rho_new = parse_integral<int>(key, value);
  else if (key == "prod_share") c.prod_share = parse_real(key, value);
  else if (key == "p_schema") c.p_schema = parse_real(key, value);
  else if (key == "seed") c.seed = parse_integral<std::uint64_t>(key, value);
  else if (key == "ticks") c.ticks = parse_integral<std::uint64_t>(key, value);
  else if (key == "env_decay") c.env_decay = parse_switch(key, value);
  else if (key == "seed_schema_kind") {
    try {
      c.seed_schema_kind = parse_kind_allowed(value);
    } catch (const Error&) {
      fail(ErrorCode::InvalidConfig, fmt::format("seed_schema_kind: '{}' is not both|productive|destructive", value));
    }
  } else if (key == "seed_arity") c.seed_arity = parse_integral<std::uint32_t>(key, value);
  else if (key == "window") c.window = parse_integral<std::size_t>(key, value);
  else if (key == "theta") {
    if (value == "auto") c.theta.reset();
    else c.theta = parse_real(key, value);
  } else if (key == "epsilon") c.epsilon = parse_real(key, value);
  else if (key == "freeze_horizon") c.freeze_horizon = parse_integral<std::size_t>(key, value);
  else if (key == "out") c.out = std::string(value);
  else fail(ErrorCode::InvalidConfig, fmt::format("unknown config key '{}'", key));
}

std::string to_text(const RunConfig& c, bool include_out) {
  std::string out;
  auto line = [&out](std::string_view key, const std::string& value) { out += fmt::format("{} = {}\n", key, value); };
  line("e", std::to_string(c.e));
  line("env_e", std::to_string(c.env_e));
  line("n0", std::to_string(c.n0));
  line("r_density", format_double(c.r_density));
  line("lambda", format_double(c.lambda));
  line("p_plus", format_double(c.p_plus));
  line("rho_new", std::to_string(c.rho_new));
  line("prod_share", format_double(c.prod_share));
  line("p_schema", format_double(c.p_schema));
  line("seed", std::to_string(c.seed));
  line("ticks", std::to_string(c.ticks));
  line("env_decay", c.env_decay ? "on" : "off");
  line("seed_schema_kind", std::string(to_string(c.seed_schema_kind)));
  line("seed_arity", std::to_string(c.seed_arity));
  line("window", std::to_string(c.window));
  line("theta", c.theta ? format_double(*c.theta) : "auto");
  line("epsilon", format_double(c.epsilon));
  line("freeze_horizon", std::to_string(c.freeze_horizon));
  if (include_out && !c.out.empty()) line("out", c.out);
  return out;
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      fail(ErrorCode::InvalidConfig, fmt::format("line {}: expected 'key = value'", lineno));
    }
    set_field(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

}  // namespace oee
