#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rhc/types.hpp"

namespace rhc {

struct CheckResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;   // the quantity the check bounds
    double bound = 0.0;      // the bound it must satisfy
    std::string detail;      // one-line context (comparison direction, units)
};

// Fault-injection points for exercising the failure paths of the suite.
struct CheckHooks {
    // When set, replaces the computed Riccati solution in the residual check.
    std::optional<Mat> pi_override;
};

// The two-state system with one unstable mode used by the shipped configs
// and the embedded checks: A = [[0.5, 1], [0, -1]], B = (1, 1),
// N = [[-0.2, -0.2], [0, -0.2]], C = I, alpha = 0.1, started at y0 = (1, 1).
BilinearSystem benchmark_system();
Vec benchmark_y0();

// The embedded verification suite behind the `check` subcommand: fast,
// deterministic re-verification of the library's core guarantees (Riccati
// residual and decay rate, gradient versus finite differences with a fixed
// seed, integrator order, cubic-term identity, LQ exactness of the
// receding-horizon loop, closed-loop decay). Every check runs even if an
// earlier one fails.
std::vector<CheckResult> run_checks(const CheckHooks& hooks = {});

}  // namespace rhc
