#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace newsnet::cli {

/// Exit codes.
enum Exit : int {
    ok = 0,
    failure = 1,       // I/O or internal error
    usage = 2,         // bad command line
    bad_request = 3,   // rejected parameters (HTTP 400)
    not_found = 4,     // unknown entity or node (HTTP 404)
};

/// Entry point shared by the executable and tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace newsnet::cli
