#pragma once

#include <string>
#include <vector>

namespace relaxsoh {

// Runs one command-line invocation. `args` holds the tokens after the program
// name. Prints a JSON summary (or, on failure, a machine-readable error JSON)
// to stdout and returns the process exit code: 0 on success, 2 on usage
// errors, 1 on data/numeric errors.
int cli_run(const std::vector<std::string>& args);

} // namespace relaxsoh
