#pragma once

#include <iosfwd>

namespace plap::cli {

/// Entry point of the plap command line. Results go to the -o file, or to
/// `out` when no file is given; diagnostics go to `err`.
/// Returns 0 on success, 1 when a solver fails, 2 for invalid input.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace plap::cli
