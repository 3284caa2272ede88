#pragma once

namespace spectral {

// full command-line front end; returns the process exit code
// (0 success, 2 validation error, 3 invariant breach)
int run_cli(int argc, const char* const* argv);

}  // namespace spectral
