// commands.hpp — experiment commands behind the CLI subcommands
//
// Each command resolves its inputs from a RunConfig, runs the computation,
// and writes '#'-headed delimited tables under the output directory.
// Identical configuration and seed produce byte-identical files.

#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace nvlev::cli {

// Returns the paths written, for reporting.
std::vector<std::string> cmd_fringe(const RunConfig& cfg);
std::vector<std::string> cmd_fidelity_grid(const RunConfig& cfg);
std::vector<std::string> cmd_ramsey(const RunConfig& cfg);
std::vector<std::string> cmd_psd(const RunConfig& cfg);
std::vector<std::string> cmd_synth(const RunConfig& cfg);

}  // namespace nvlev::cli
