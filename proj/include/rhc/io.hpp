#pragma once

#include <string>
#include <vector>

#include "rhc/experiments.hpp"

namespace rhc {

// --- logging ---------------------------------------------------------------

enum class LogLevel { error = 0, info = 1, debug = 2 };

// Level taken from the RHC_LOG environment variable (error, info, debug);
// defaults to error. Read once per process.
LogLevel log_level();

// Writes "[level] message" to stderr when the level is enabled.
void log_info(const std::string& message);
void log_debug(const std::string& message);

// --- config files ----------------------------------------------------------

// System file: JSON object with keys "A", "N", "C" (row-major nested arrays),
// "B" (array), "alpha" (positive number). Validated on load.
BilinearSystem load_system(const std::string& path);
void save_system(const BilinearSystem& sys, const std::string& path);

struct RunConfig {
    BilinearSystem system;
    Vec y0;
    RhcConfig cfg;          // penalty built on load (Riccati solve if needed)
};

// Run file keys: "system" (path, relative to the config file), "y0", "tau",
// "T", "L", "phi" ({"kind": zero|quadratic|taylor2|taylor3, "Q": rows} with Q
// only for quadratic), "solver" ({"grad_tol", "h", "max_iters", "lbfgs_memory"},
// each optional). Overrides are dotted-path KEY=VALUE strings applied to the
// parsed JSON before interpretation, e.g. "solver.h=0.002" or "phi.kind=zero".
RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides = {});

// Sweep file keys: "system", "y0", "tau_values", "T_values", "penalties"
// (array of 1|2|3), "L", "solver" as above. Same override mechanism.
SweepSpec load_sweep_spec(const std::string& path,
                          const std::vector<std::string>& overrides = {});

}  // namespace rhc
