#pragma once

#include <iosfwd>

namespace ssl {

// Full command-line driver: reports to out, diagnostics to err. Returns the
// process exit code: 0 on a passing verdict, 1 on a failing one, 2 on usage
// or IO errors.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace ssl
