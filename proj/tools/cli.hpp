#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "oee/config.hpp"
#include "oee/run.hpp"

namespace oee::cli {

enum Exit : int { kOk = 0, kFailed = 1, kUsage = 2, kIo = 3 };

// Raised for unreadable or unwritable files; maps to kIo.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::filesystem::path& path);

// Writes to a temporary sibling then renames over the final name.
void write_atomic(const std::filesystem::path& path, const std::string& bytes);

// OEE_OUT if set, otherwise "runs".
std::filesystem::path default_root();

struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

// "key=v1,v2,..."; throws InvalidConfig on malformed specs.
GridAxis parse_grid_axis(const std::string& spec);

int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_replay(const std::filesystem::path& manifest, std::ostream& out, std::ostream& err);
int cmd_stats(const std::filesystem::path& run_dir, const StatsOptions& options, std::ostream& out,
              std::ostream& err);
int cmd_sweep(const RunConfig& base, const std::vector<GridAxis>& grid, unsigned jobs, const StatsOptions& options,
              std::ostream& out, std::ostream& err);

// Full command line, argv[0] included.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace oee::cli
