// Command-line driver; exposed as a function so tests can invoke it in-process.
#pragma once

namespace rwrs {

/// Exit codes: 0 success, 2 validation error (including unknown flags), 1
/// runtime error.
int run_cli(int argc, const char* const* argv);

}  // namespace rwrs
