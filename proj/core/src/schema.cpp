#include "oee/schema.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include <fmt/format.h>

#include "oee/error.hpp"

namespace oee {

std::string_view to_string(KindAllowed k) noexcept {
  switch (k) {
    case KindAllowed::Productive: return "productive";
    case KindAllowed::Destructive: return "destructive";
    case KindAllowed::Both: return "both";
  }
  return "?";
}

KindAllowed parse_kind_allowed(std::string_view text) {
  if (text == "productive") return KindAllowed::Productive;
  if (text == "destructive") return KindAllowed::Destructive;
  if (text == "both") return KindAllowed::Both;
  fail(ErrorCode::ParseError, "unknown schema kind '" + std::string(text) + "'");
}

bool RuleSchema::allows(RuleKind kind) const noexcept {
  switch (kind_allowed) {
    case KindAllowed::Both: return true;
    case KindAllowed::Productive: return kind == RuleKind::Productive;
    case KindAllowed::Destructive: return kind == RuleKind::Destructive;
  }
  return false;
}

SchemaRegistry SchemaRegistry::with_seed(KindAllowed kind, std::uint32_t arity) {
  SchemaRegistry registry;
  registry.add_seed(kind, arity);
  return registry;
}

const RuleSchema& SchemaRegistry::add_seed(KindAllowed kind, std::uint32_t arity) {
  if (arity < 1) fail(ErrorCode::InvalidParameter, "schema arity must be at least 1");
  if (std::any_of(schemas_.begin(), schemas_.end(), [](const RuleSchema& s) { return !s.is_seed(); })) {
    fail(ErrorCode::InvalidParameter, "seed schemas must precede genesis schemas");
  }
  schemas_.push_back({static_cast<SchemaId>(schemas_.size()), kind, arity, std::nullopt});
  return schemas_.back();
}

const RuleSchema& SchemaRegistry::add_genesis(KindAllowed kind, std::uint32_t arity, Tick tick) {
  if (arity < 1) fail(ErrorCode::InvalidParameter, "schema arity must be at least 1");
  schemas_.push_back({static_cast<SchemaId>(schemas_.size()), kind, arity, tick});
  return schemas_.back();
}

const RuleSchema& SchemaRegistry::at(SchemaId id) const {
  if (!contains(id)) fail(ErrorCode::UnknownSchema, fmt::format("schema {}", id));
  return schemas_[id];
}

std::uint32_t SchemaRegistry::max_arity() const noexcept {
  std::uint32_t best = 0;
  for (const auto& s : schemas_) best = std::max(best, s.arity);
  return best;
}

std::string to_text(const SchemaRegistry& registry) {
  std::string out;
  for (const auto& s : registry.schemas()) {
    if (s.genesis_tick) {
      out += fmt::format("S {} {} {} genesis {}\n", s.id, to_string(s.kind_allowed), s.arity,
                         *s.genesis_tick);
    } else {
      out += fmt::format("S {} {} {} seed\n", s.id, to_string(s.kind_allowed), s.arity);
    }
  }
  return out;
}

namespace {

template <class T>
T parse_number(const std::string& token, const std::string& line) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) {
    fail(ErrorCode::ParseError, "bad number '" + token + "' in: " + line);
  }
  return value;
}

}  // namespace

SchemaRegistry schema_registry_from_text(std::string_view text) {
  SchemaRegistry registry;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::string tag, id, kind, arity, origin, tick;
    fields >> tag >> id >> kind >> arity >> origin;
    if (tag != "S" || origin.empty()) fail(ErrorCode::ParseError, "bad schema line: " + line);
    const auto sid = parse_number<SchemaId>(id, line);
    if (sid != registry.size()) fail(ErrorCode::ParseError, "schema ids must be dense: " + line);
    const auto k = parse_kind_allowed(kind);
    const auto a = parse_number<std::uint32_t>(arity, line);
    if (origin == "seed") {
      registry.add_seed(k, a);
    } else if (origin == "genesis") {
      fields >> tick;
      registry.add_genesis(k, a, parse_number<Tick>(tick, line));
    } else {
      fail(ErrorCode::ParseError, "bad schema origin: " + line);
    }
  }
  return registry;
}

std::optional<RuleSchema> genesis_schema(SchemaRegistry& registry, double p_schema, Rng& rng,
                                         Tick tick) {
  if (!(p_schema >= 0.0 && p_schema <= 1.0)) {
    fail(ErrorCode::InvalidParameter, "p_schema must lie in [0, 1]");
  }
  if (!rng.bernoulli(p_schema)) return std::nullopt;
  return registry.add_genesis(KindAllowed::Both, registry.max_arity() + 1, tick);
}

const std::vector<std::string_view>& MetamodelLayers::fixed_building_blocks() {
  static const std::vector<std::string_view> blocks{"entity", "milieu", "update", "adaptation",
                                                    "target"};
  return blocks;
}

std::string MetamodelLayers::fixed_descriptor() {
  std::string out = "[fixed-layer]\n";
  for (auto block : fixed_building_blocks()) {
    out += "block = ";
    out += block;
    out += '\n';
  }
  return out;
}

}  // namespace oee
