#pragma once

// Command-line front end over the C API. Split from main() so tests can
// drive it in-process. Returns the process exit code: 0 success, 1 runtime
// failure, 2 usage error.
int run_cli(int argc, const char* const* argv);
