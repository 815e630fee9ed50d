#pragma once

#include "config.hpp"

#include <filesystem>
#include <iosfwd>

namespace ccd::cli {

/// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// Verbosity from CCD_LOG_LEVEL: quiet, error, warn, info (default), debug.
enum class LogLevel { kQuiet, kError, kWarn, kInfo, kDebug };
LogLevel log_level_from_env();
void log(LogLevel level, const std::string& message);

struct CommandOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir = "out";
  Overrides overrides;
};

int run_command(const CommandOptions& options);
int compare_command(const CommandOptions& options);
int condition_command(const CommandOptions& options, std::ostream& out);

}  // namespace ccd::cli
