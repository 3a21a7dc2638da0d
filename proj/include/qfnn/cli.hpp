#pragma once

#include <iosfwd>

namespace qfnn {

// Exit codes: 0 success, 1 user error (bad flags, unreadable or malformed
// input, invalid configuration), 2 internal error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qfnn
