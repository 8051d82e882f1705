#pragma once
// Command-line front door: argument parsing on top of the config module and
// the four workflows (estimate, frontier, simulate, evaluate). Every run
// writes the resolved configuration next to its artifacts, and identical
// config + seed produce byte-identical output files.

#include <string>
#include <vector>

namespace fairpol {

/// Parses `<command> [--config file] [--key value | --key=value ...]`,
/// runs the workflow, writes artifacts into output_dir, and returns the
/// process exit code: 0 success, 2 configuration errors, 3 data errors,
/// 4 solver errors (1 for anything unforeseen). Messages go to `out` /
/// `err` so tests can capture them.
int run_cli(const std::vector<std::string>& args, std::string& out, std::string& err);

/// main()-shaped wrapper: forwards to run_cli and prints the streams.
int run_cli_main(int argc, char** argv);

}  // namespace fairpol
