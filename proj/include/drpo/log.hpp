#pragma once

namespace drpo::log {

// Verbosity comes from the DRPO_LOG environment variable: 0 (default,
// silent), 1 (info), 2 (debug). Messages go to stderr so they never mix
// with machine-readable output on stdout.
int level();

void info(const char* fmt, ...);
void debug(const char* fmt, ...);

}  // namespace drpo::log
