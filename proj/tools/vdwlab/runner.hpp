#pragma once

#include "config.hpp"

#include <filesystem>
#include <ostream>
#include <string>

namespace vdw::cli {

inline constexpr int kSchemaVersion = 1;

struct RunOptions {
  std::filesystem::path out_dir = "results";
  std::size_t jobs = 1;
  /// Path and raw bytes of the config, for the manifest hash.
  std::string config_path;
  std::string config_text;
};

/// Runs every scenario with at most `jobs` in flight, writes one result file per
/// successful scenario and manifest.json. Returns 0 iff no scenario failed.
int run_scenarios(const RunConfig& cfg, const RunOptions& options, std::ostream& log);

/// Lowercase hex SHA-256.
std::string sha256_hex(const std::string& bytes);

} // namespace vdw::cli
