#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "cli/range.hpp"
#include "cli/table.hpp"
#include "permorder/exactdist.hpp"

namespace permorder::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitFindings = 3;

inline constexpr const char* kCacheDirEnv = "PERMORDER_CACHE_DIR";

struct CommandConfig {
  std::string subcommand;
  NRange n;
  std::optional<std::string> m;
  std::string k = "max";        // eta-check: "0", "max", or an explicit member of K_n
  std::optional<std::string> eps;
  std::string claim = "thm12";  // verify: thm11 | thm12 | ineq
  std::string target = "p";     // sample: p | collision
  std::uint64_t trials = 100'000;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  Format format = Format::table;
  std::optional<std::filesystem::path> cache_dir;
  exactdist::Budget budget;
};

/// Runs one configured command; results go to `out`, diagnostics to `err`.
/// Returns kExitFindings when a verification or scan found violations.
int run(const CommandConfig& config, std::ostream& out, std::ostream& err);

/// Parses the command line (CLI11) and runs it.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace permorder::cli
