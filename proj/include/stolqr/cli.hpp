#pragma once

#include <iosfwd>

namespace stolqr {

/// Entry point of the `stolqr` tool. Returns the process exit code:
/// 0 success, 1 solver/numerical failure, 2 configuration or usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stolqr
