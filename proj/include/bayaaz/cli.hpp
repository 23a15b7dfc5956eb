#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bayaaz {

// Runs one `bayaaz` command line. `args` excludes the program name.
// Returns 0 on success, 1 on a runtime failure, 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace bayaaz
