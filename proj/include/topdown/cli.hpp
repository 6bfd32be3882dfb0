#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "topdown/oracle.hpp"

namespace topdown::cli {

/// Exit codes shared by all commands.
enum ExitCode : int { kYes = 0, kNo = 1, kError = 2 };

struct CheckOptions {
  bool json = false;
  bool verify = false;
  std::size_t oracle_bound = 6;
  bool stats = false;
  bool full_closure = false;
};

/// 0: top-down deterministic, 1: not, 2: parse/resource/verification error.
int check(const std::filesystem::path& path, const CheckOptions& options, std::ostream& out, std::ostream& err);

/// Writes the associated top-down automaton to `out_path`, or to `out`.
int build_dta(const std::filesystem::path& path, const std::optional<std::filesystem::path>& out_path, bool stats,
              std::ostream& out, std::ostream& err);

int gen(const GenSpec& spec, const std::optional<std::filesystem::path>& out_path, std::ostream& out,
        std::ostream& err);

struct FuzzOptions {
  /// Seed of the first automaton; the i-th uses seed + i.
  GenSpec base;
  std::size_t count = 100;
  std::size_t bound = 6;
};

/// 0 when every automaton passes the differential check, 1 otherwise.
int fuzz(const FuzzOptions& options, std::ostream& out, std::ostream& err);

/// Prints the state reached by `tree`; 0 when accepted, 1 when rejected.
int eval(const std::filesystem::path& path, const std::string& tree, std::ostream& out, std::ostream& err);

/// Full command line entry point (`topdown <command> ...`).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace topdown::cli
