#pragma once

#include "drpo/run_config.hpp"

namespace drpo {

// Batch entry points behind the CLI subcommands. Exit codes:
//   0 full success, 1 config/data error, 2 partial trajectory failure,
//   3 bracket failure (critical radius), 4 verification failure.
int run_trajectory(const RunConfig& cfg);
int run_critical_radius(const RunConfig& cfg);
int run_verify(const RunConfig& cfg);

}  // namespace drpo
