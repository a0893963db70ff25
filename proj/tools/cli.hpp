#pragma once

#include <iosfwd>

namespace taylormap::cli {

/// Runs one command line. Returns 0 when every output was written and all
/// results are finite, 1 on a runtime failure and 2 on a usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace taylormap::cli
