#pragma once

// Subcommands of the pilotpbr tool. Each reads a JSON config, writes its
// outputs into the output directory and returns a process exit code.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

namespace pilotpbr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitContradiction = 3;
inline constexpr int kExitFailure = 4;

struct RunOptions {
  std::filesystem::path config;
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;  // overrides the config seed
};

// These throw library errors; run_command maps them to exit codes.
int cmd_pbr(const RunOptions& opts, std::ostream& log);
int cmd_beamsplitter(const RunOptions& opts, std::ostream& log);
int cmd_epr(const RunOptions& opts, std::ostream& log);
int cmd_fields(const RunOptions& opts, std::ostream& log);

// ConfigError -> 2, any other failure -> 4. Messages go to `err`.
int run_command(std::string_view name, const RunOptions& opts, std::ostream& log, std::ostream& err);

}  // namespace pilotpbr::cli
