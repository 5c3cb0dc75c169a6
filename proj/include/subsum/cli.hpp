#pragma once

#include <iosfwd>

namespace subsum::cli {

/// Runs one `subsum` command line. Exit status: 0 success, 1 diagnostics or
/// model errors, 2 usage or I/O errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace subsum::cli
