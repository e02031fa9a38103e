#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace urnflow {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    exit_ok = 0,
    exit_verify_failed = 1,
    exit_parse = 2,
    exit_theory = 3,
    exit_io = 4,
    exit_domain = 5,
};

/// Entry point of `urnflow <command> [flags]`, writing to the given streams.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace urnflow
