#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

namespace srfid::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPartial = 1;  // some records failed, output still written
inline constexpr int kExitUsage = 2;    // bad arguments, unreadable inputs, environment

struct Globals {
  std::filesystem::path data_dir = ".";
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0 = hardware concurrency
  std::string log_level = "info";

  /// Relative paths resolve against --data-dir.
  std::filesystem::path resolve(const std::filesystem::path& p) const {
    return p.is_absolute() || p.empty() ? p : data_dir / p;
  }
};

/// Each register_* adds a subcommand whose callback stores its exit code
/// in `exit_code`. Errors escape as srfid::Error and are mapped in main.
void register_degrade(CLI::App& app, const Globals& g, int& exit_code);
void register_score(CLI::App& app, const Globals& g, int& exit_code);
void register_hlf(CLI::App& app, const Globals& g, int& exit_code);
void register_select(CLI::App& app, const Globals& g, int& exit_code);
void register_aggregate(CLI::App& app, const Globals& g, int& exit_code);
void register_split(CLI::App& app, const Globals& g, int& exit_code);
void register_correlate(CLI::App& app, const Globals& g, int& exit_code);
void register_report(CLI::App& app, const Globals& g, int& exit_code);
void register_serve(CLI::App& app, const Globals& g, int& exit_code);

}  // namespace srfid::cli
