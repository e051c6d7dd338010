#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace suitgraph::cli {

enum ExitCode : int {
    kOk = 0,
    kInternalError = 1,
    kInputError = 2,
    kUnknownClass = 3,
    kSpecificationNeeded = 4,
};

/// Entry point of the `suitgraph` tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace suitgraph::cli
