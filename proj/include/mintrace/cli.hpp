#pragma once

#include <iosfwd>

namespace mintrace {

/// Parses argv, runs the selected subcommand and returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mintrace
