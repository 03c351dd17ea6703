#include "cli.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "oee/digest.hpp"
#include "oee/error.hpp"

namespace oee::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kManifest = "manifest.json";
const std::vector<std::string> kRequired{"events.jsonl", "ledger.jsonl", "rules.txt", "schemas.txt", "series.csv"};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

void write_report(const fs::path& dir, const StatsReport& report) {
  write_atomic(dir / "report.json", to_json(report).dump(2) + '\n');
  write_atomic(dir / "report.txt", to_summary(report));
}

// Runs the simulation and emits every artifact; the manifest goes last so a
// directory holding a manifest is complete.
RunResult produce_run(const RunConfig& config, const fs::path& dir) {
  auto result = simulate(config);
  const auto artifacts = render(result);
  ensure_dir(dir);
  for (const auto& [name, bytes] : artifacts) write_atomic(dir / name, bytes);
  write_atomic(dir / kManifest, render_manifest(make_manifest(config, artifacts)));
  return result;
}

fs::path resolve_run_dir(const RunConfig& config) {
  if (!config.out.empty()) return config.out;
  return default_root() / fmt::format("seed-{}", config.seed);
}

nlohmann::json load_manifest(const fs::path& path) {
  const auto text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ParseError, fmt::format("{} is not valid JSON: {}", path.string(), e.what()));
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("error reading {}", path.string()));
  return buf.str();
}

void write_atomic(const fs::path& path, const std::string& bytes) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(fmt::format("cannot write {}", tmp.string()));
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw IoError(fmt::format("error writing {}", tmp.string()));
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError(fmt::format("cannot rename into {}", path.string()));
  }
}

fs::path default_root() {
  if (const char* env = std::getenv("OEE_OUT"); env != nullptr && *env != '\0') return env;
  return "runs";
}

GridAxis parse_grid_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
    fail(ErrorCode::InvalidConfig, fmt::format("grid spec '{}' must look like key=v1,v2", spec));
  }
  GridAxis axis{spec.substr(0, eq), {}};
  const auto& keys = config_keys();
  if (std::find(keys.begin(), keys.end(), axis.key) == keys.end()) {
    fail(ErrorCode::InvalidConfig, fmt::format("unknown config key '{}' in grid", axis.key));
  }
  if (axis.key == "seed" || axis.key == "out") {
    fail(ErrorCode::InvalidConfig, fmt::format("'{}' cannot be swept; cell seeds are base seed + cell index", axis.key));
  }
  std::stringstream values(spec.substr(eq + 1));
  std::string v;
  while (std::getline(values, v, ',')) {
    if (v.empty()) fail(ErrorCode::InvalidConfig, fmt::format("empty value in grid spec '{}'", spec));
    axis.values.push_back(v);
  }
  return axis;
}

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    validate(config);
  } catch (const Error& e) {
    err << "oee-sim: invalid config: " << e.what() << '\n';
    return kUsage;
  }
  const auto dir = resolve_run_dir(config);
  try {
    const auto result = produce_run(config, dir);
    out << fmt::format("ran {} ticks (seed {}); {} rules, {} schemas -> {}\n", config.ticks, config.seed,
                       result.rules.size(), result.schemas.size(), dir.string());
    return kOk;
  } catch (const IoError& e) {
    err << "oee-sim: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    err << "oee-sim: run failed: " << e.what() << '\n';
    return kFailed;
  }
}

int cmd_replay(const fs::path& target, std::ostream& out, std::ostream& err) {
  const auto manifest_path = fs::is_directory(target) ? target / kManifest : target;
  const auto dir = manifest_path.parent_path();
  try {
    const auto manifest = load_manifest(manifest_path);
    const auto version = manifest.value("engine_version", std::string{});
    if (version != kEngineVersion) {
      err << fmt::format("oee-sim: manifest was written by engine '{}' but this is '{}'; replay is not compatible\n",
                         version, kEngineVersion);
      return kFailed;
    }
    const auto config = config_from_manifest(manifest);
    if (manifest.value("end_tick", std::uint64_t{0}) != config.ticks) {
      err << "oee-sim: manifest tick range disagrees with its config\n";
      return kFailed;
    }
    const auto& digests = manifest.at("digests");
    const auto artifacts = render(simulate(config));

    std::vector<std::string> diverging;
    for (const auto& [name, bytes] : artifacts) {
      const auto it = digests.find(name);
      if (it == digests.end() || it->get<std::string>() != sha256_hex(bytes)) {
        diverging.push_back(name + " (recomputed)");
        continue;
      }
      std::string on_disk;
      try {
        on_disk = read_file(dir / name);
      } catch (const IoError&) {
        diverging.push_back(name + " (missing)");
        continue;
      }
      if (on_disk != bytes) diverging.push_back(name + " (on disk)");
    }
    for (const auto& [name, _] : digests.items()) {
      if (!artifacts.contains(name)) diverging.push_back(name + " (unknown)");
    }
    if (!diverging.empty()) {
      for (const auto& d : diverging) err << "oee-sim: digest mismatch: " << d << '\n';
      return kFailed;
    }
    out << fmt::format("replay ok: {} artifacts match ({} ticks, seed {})\n", artifacts.size(), config.ticks,
                       config.seed);
    return kOk;
  } catch (const IoError& e) {
    err << "oee-sim: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    err << "oee-sim: replay failed: " << e.what() << '\n';
    return kFailed;
  } catch (const nlohmann::json::exception& e) {
    err << "oee-sim: malformed manifest: " << e.what() << '\n';
    return kFailed;
  }
}

int cmd_stats(const fs::path& run_dir, const StatsOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const auto manifest = load_manifest(run_dir / kManifest);
    const auto config = config_from_manifest(manifest);
    const auto& digests = manifest.at("digests");

    std::map<std::string, std::string> files;
    bool ok = true;
    for (const auto& name : kRequired) {
      const auto it = digests.find(name);
      if (it == digests.end()) {
        err << "oee-sim: manifest lists no digest for " << name << '\n';
        ok = false;
        continue;
      }
      auto bytes = read_file(run_dir / name);
      if (sha256_hex(bytes) != it->get<std::string>()) {
        err << "oee-sim: digest mismatch: " << name << '\n';
        ok = false;
      }
      files.emplace(name, std::move(bytes));
    }
    if (!ok) return kFailed;

    const auto log = event_log_from_jsonl(files.at("events.jsonl"));
    const auto rules = rule_table_from_text(files.at("rules.txt"));
    const auto schemas = schema_registry_from_text(files.at("schemas.txt"));
    const auto ledger = ledger_from_jsonl(files.at("ledger.jsonl"));
    if (series_from_csv(files.at("series.csv")) != series_from_log(log, rules)) {
      err << "oee-sim: series.csv disagrees with the event log\n";
      return kFailed;
    }
    const auto report = compute_stats(config, log, rules, schemas, ledger, options);
    write_report(run_dir, report);
    out << to_summary(report);
    return kOk;
  } catch (const IoError& e) {
    err << "oee-sim: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    err << "oee-sim: stats failed: " << e.what() << '\n';
    return kFailed;
  } catch (const nlohmann::json::exception& e) {
    err << "oee-sim: malformed manifest: " << e.what() << '\n';
    return kFailed;
  }
}

int cmd_sweep(const RunConfig& base, const std::vector<GridAxis>& grid, unsigned jobs, const StatsOptions& options,
              std::ostream& out, std::ostream& err) {
  if (grid.empty()) {
    err << "oee-sim: sweep needs at least one --grid axis\n";
    return kUsage;
  }
  std::size_t cells = 1;
  for (const auto& axis : grid) cells *= axis.values.size();
  const fs::path root = base.out.empty() ? default_root() / "sweep" : fs::path(base.out);
  try {
    ensure_dir(root);
  } catch (const IoError& e) {
    err << "oee-sim: " << e.what() << '\n';
    return kIo;
  }

  struct Row {
    std::uint64_t seed = 0;
    std::vector<std::string> values;
    std::string transitions, alpha, freeze, status;
  };
  std::vector<Row> rows(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    rows[i].seed = base.seed + i;
    std::size_t rem = i;
    rows[i].values.resize(grid.size());
    for (std::size_t a = grid.size(); a-- > 0;) {
      rows[i].values[a] = grid[a].values[rem % grid[a].values.size()];
      rem /= grid[a].values.size();
    }
  }

  auto run_cell = [&](std::size_t i) {
    auto& row = rows[i];
    try {
      RunConfig config = base;
      for (std::size_t a = 0; a < grid.size(); ++a) set_field(config, grid[a].key, row.values[a]);
      config.seed = row.seed;
      config.out.clear();
      validate(config);
      const auto dir = root / fmt::format("cell-{:04}", i);
      const auto result = produce_run(config, dir);
      const auto report = compute_stats(config, result.log, result.rules, result.schemas, result.ledger, options);
      write_report(dir, report);
      row.transitions = std::to_string(report.transitions.size());
      row.alpha = report.fit ? fmt::format("{}", report.fit->alpha) : "";
      row.freeze = !report.freeze_checked ? "unchecked" : report.freeze.frozen ? "frozen" : "active";
      row.status = "ok";
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
  };

  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(cells)));
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    for (unsigned j = 0; j < jobs; ++j) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cells; i = next++) run_cell(i);
      });
    }
  }

  std::string csv = "cell,seed";
  for (const auto& axis : grid) csv += "," + axis.key;
  csv += ",transitions,alpha,freeze,status\n";
  bool failed = false;
  for (std::size_t i = 0; i < cells; ++i) {
    const auto& row = rows[i];
    csv += fmt::format("{},{}", i, row.seed);
    for (const auto& v : row.values) csv += "," + csv_field(v);
    csv += fmt::format(",{},{},{},{}\n", row.transitions, row.alpha, row.freeze, csv_field(row.status));
    if (row.status != "ok") {
      failed = true;
      err << fmt::format("oee-sim: cell {} failed: {}\n", i, row.status);
    }
  }
  try {
    write_atomic(root / "summary.csv", csv);
  } catch (const IoError& e) {
    err << "oee-sim: " << e.what() << '\n';
    return kIo;
  }
  out << fmt::format("sweep: {} cells -> {}\n", cells, (root / "summary.csv").string());
  return failed ? kFailed : kOk;
}

namespace {

// --key value for every config key; underscores also accepted as dashes.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "Config file of `key = value` lines")->check(CLI::ExistingFile);
    for (const auto key : config_keys()) {
      std::string name = "--" + std::string(key);
      if (key.find('_') != std::string_view::npos) {
        std::string dashed(key);
        std::replace(dashed.begin(), dashed.end(), '_', '-');
        name += ",--" + dashed;
      }
      app.add_option(name, values[std::string(key)], fmt::format("Override '{}'", key));
    }
  }

  RunConfig resolve(CLI::App& app) const {
    RunConfig config;
    if (!config_path.empty()) config = parse_config(read_file(config_path));
    for (const auto key : config_keys()) {
      const auto* opt = app.get_option("--" + std::string(key));
      if (opt->count() > 0) set_field(config, key, values.at(std::string(key)));
    }
    return config;
  }
};

void attach_stats_flags(CLI::App& app, std::string& observable, std::uint64_t& x_min, bool& scan) {
  app.add_option("--observable", observable, "Fit input: increments|avalanches|lifetimes")
      ->check(CLI::IsMember({"increments", "avalanches", "lifetimes"}));
  app.add_option("--x-min", x_min, "Lower cutoff of the power-law fit")->check(CLI::PositiveNumber);
  app.add_flag("--scan-x-min", scan, "Choose x_min by minimising the KS distance");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Open-ended evolution simulator", "oee-sim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kEngineVersion));

  ConfigFlags run_flags, sweep_flags;
  auto* run = app.add_subcommand("run", "Execute one run and write its artifacts");
  run_flags.attach(*run);

  std::string replay_target;
  auto* replay = app.add_subcommand("replay", "Recompute a run and verify its digests");
  replay->add_option("manifest", replay_target, "manifest.json or its run directory")->required();

  std::string stats_dir, observable = "avalanches";
  std::uint64_t x_min = 1;
  bool scan = false;
  auto* stats = app.add_subcommand("stats", "Analyse a run directory");
  stats->add_option("run_dir", stats_dir, "Run directory")->required();
  attach_stats_flags(*stats, observable, x_min, scan);

  std::vector<std::string> grid_specs;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  auto* sweep = app.add_subcommand("sweep", "Run a parameter grid");
  sweep_flags.attach(*sweep);
  sweep->add_option("--grid", grid_specs, "Axis as key=v1,v2 (repeatable)")->required();
  sweep->add_option("--jobs", jobs, "Parallel cells")->check(CLI::PositiveNumber);
  attach_stats_flags(*sweep, observable, x_min, scan);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  const StatsOptions stats_options{parse_observable(observable), x_min, scan};
  try {
    if (*run) return cmd_run(run_flags.resolve(*run), out, err);
    if (*replay) return cmd_replay(replay_target, out, err);
    if (*stats) return cmd_stats(stats_dir, stats_options, out, err);
    std::vector<GridAxis> grid;
    for (const auto& spec : grid_specs) grid.push_back(parse_grid_axis(spec));
    return cmd_sweep(sweep_flags.resolve(*sweep), grid, jobs, stats_options, out, err);
  } catch (const IoError& e) {
    err << "oee-sim: " << e.what() << '\n';
    return kIo;
  } catch (const Error& e) {
    err << "oee-sim: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace oee::cli
