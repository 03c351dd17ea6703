#include "oee/rules.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "oee/error.hpp"

namespace oee {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void validate(const DynamicsParams& params, std::size_t capacity) {
  if (!is_probability(params.lambda)) fail(ErrorCode::InvalidParameter, "lambda must lie in [0, 1]");
  if (!is_probability(params.p_plus)) fail(ErrorCode::InvalidParameter, "p_plus must lie in [0, 1]");
  if (capacity > 0 && params.env_e >= capacity) {
    fail(ErrorCode::InvalidParameter, "env_e must be smaller than the entity capacity");
  }
}

RuleTable::RuleTable(std::size_t capacity, DynamicsParams params)
    : capacity_(capacity),
      params_(params),
      by_output_(capacity),
      by_target_(capacity),
      by_input_(capacity) {
  validate(params_, capacity_);
}

RuleId RuleTable::add(SchemaId schema, RuleKind kind, std::vector<EntityIndex> inputs,
                      EntityIndex output) {
  if (inputs.empty()) fail(ErrorCode::InvalidRule, "a rule needs at least one input");
  std::sort(inputs.begin(), inputs.end());
  if (std::adjacent_find(inputs.begin(), inputs.end()) != inputs.end()) {
    fail(ErrorCode::InvalidRule, "rule inputs must be pairwise distinct");
  }
  if (output >= capacity_ || inputs.back() >= capacity_) {
    fail(ErrorCode::InvalidRule, fmt::format("rule index out of range [0, {})", capacity_));
  }
  if (std::binary_search(inputs.begin(), inputs.end(), output)) {
    fail(ErrorCode::InvalidRule, "a rule may not take its own output as input");
  }
  const auto id = static_cast<RuleId>(rules_.size());
  for (auto i : inputs) by_input_[i].push_back(id);
  (kind == RuleKind::Productive ? by_output_ : by_target_)[output].push_back(id);
  rules_.push_back({id, schema, kind, std::move(inputs), output});
  return id;
}

const Rule& RuleTable::at(RuleId id) const {
  if (!contains(id)) fail(ErrorCode::UnknownRule, fmt::format("rule {}", id));
  return rules_[id];
}

std::size_t RuleTable::count(RuleKind kind) const noexcept {
  return static_cast<std::size_t>(
      std::count_if(rules_.begin(), rules_.end(), [kind](const Rule& r) { return r.kind == kind; }));
}

std::string format_double(double value) { return fmt::format("{}", value); }

std::string to_text(const RuleTable& table) {
  const auto& p = table.params();
  std::string out;
  out += fmt::format("capacity={}\n", table.capacity());
  out += fmt::format("lambda={}\n", format_double(p.lambda));
  out += fmt::format("p_plus={}\n", format_double(p.p_plus));
  out += fmt::format("env_e={}\n", p.env_e);
  out += fmt::format("env_decay={}\n", p.env_decay ? "on" : "off");
  for (const auto& r : table.rules()) {
    out += fmt::format("{} {} {} {} -> {}\n", r.kind == RuleKind::Productive ? 'P' : 'D', r.id,
                       r.schema, fmt::join(r.inputs, ","), r.output);
  }
  return out;
}

namespace {

template <class T>
T parse_int(std::string_view token, const std::string& line) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    fail(ErrorCode::ParseError, "bad integer in rule table line: " + line);
  }
  return value;
}

double parse_real(const std::string& token, const std::string& line) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || token.empty()) {
    fail(ErrorCode::ParseError, "bad number in rule table line: " + line);
  }
  return value;
}

}  // namespace

RuleTable rule_table_from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t capacity = 0;
  DynamicsParams params;
  bool header_done = false;
  std::optional<RuleTable> table;

  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (!header_done && eq != std::string::npos) {
      const auto key = line.substr(0, eq);
      const auto value = line.substr(eq + 1);
      if (key == "capacity") capacity = parse_int<std::size_t>(value, line);
      else if (key == "lambda") params.lambda = parse_real(value, line);
      else if (key == "p_plus") params.p_plus = parse_real(value, line);
      else if (key == "env_e") params.env_e = parse_int<std::size_t>(value, line);
      else if (key == "env_decay") {
        if (value != "on" && value != "off") fail(ErrorCode::ParseError, "bad env_decay: " + line);
        params.env_decay = value == "on";
      } else {
        fail(ErrorCode::ParseError, "unknown rule table header: " + line);
      }
      continue;
    }
    if (!header_done) {
      header_done = true;
      table.emplace(capacity, params);
    }
    std::istringstream fields(line);
    std::string kind, id, schema, inputs, arrow, output;
    fields >> kind >> id >> schema >> inputs >> arrow >> output;
    if ((kind != "P" && kind != "D") || arrow != "->" || output.empty()) {
      fail(ErrorCode::ParseError, "bad rule line: " + line);
    }
    std::vector<EntityIndex> in_list;
    std::string_view rest = inputs;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      in_list.push_back(parse_int<EntityIndex>(rest.substr(0, comma), line));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    const auto rid = parse_int<RuleId>(id, line);
    if (rid != table->size()) fail(ErrorCode::ParseError, "rule ids must be dense and sorted: " + line);
    table->add(parse_int<SchemaId>(schema, line), kind == "P" ? RuleKind::Productive : RuleKind::Destructive,
               std::move(in_list), parse_int<EntityIndex>(output, line));
  }
  if (!table) table.emplace(capacity, params);
  return std::move(*table);
}

}  // namespace oee
