#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "spinterf/core.hpp"

namespace spinterf {

/// Options shared by every subcommand.
struct RunConfig {
  ParamSet params;
  std::filesystem::path out_dir = ".";
  bool svg = false;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool paper_literal = false;
};

/// Parses the command line (args excludes the program name), runs the
/// subcommand and returns the process exit code: 0 on success, 2 on a
/// configuration or validation error, 3 on a numerical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace spinterf
