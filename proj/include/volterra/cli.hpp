#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "volterra/config.hpp"

namespace volterra::cli {

inline const std::vector<std::string_view> kCommands = {
    "kernel-check", "rate-function", "smile", "mc-verify", "smalltime-verify", "simulate", "eigen"};

/// Runs one subcommand, writing CSV files and run.manifest under config.out.
/// Library errors propagate to the caller.
void run_command(std::string_view command, const RunConfig& config, std::ostream& log);

/// Process entry point: parses flags, runs, and maps errors to exit codes.
int main(int argc, char** argv);

}  // namespace volterra::cli
