#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cavex::cli {

enum ExitCode : int {
    ok = 0,
    failure = 1,
    usage = 2,
    convergence = 3,
    segmentation = 4,
    nesting = 5,
};

/// Runs one command line (without the program name). Output goes to `out`
/// unless --out is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace cavex::cli
