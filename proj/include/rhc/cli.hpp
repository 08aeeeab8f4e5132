#pragma once

#include <string>
#include <vector>

namespace rhc {

// Exit-code contract shared by every subcommand.
inline constexpr int kExitOk = 0;           // success
inline constexpr int kExitConfigError = 1;  // unreadable/invalid configuration
inline constexpr int kExitNumericalError = 2;  // solver or validation failure
inline constexpr int kExitPartial = 3;      // finished with partial results

struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    std::vector<std::string> overrides;  // --set KEY=VALUE, dotted paths
    int jobs = 1;
    std::string format = "csv";          // csv | md
};

// Each command prints its report to stdout and returns the exit code.
int cmd_riccati(const CliOptions& opt);      // Pi, closed-loop matrix, decay rate
int cmd_solve(const CliOptions& opt);        // one finite-horizon solve
int cmd_rhc(const CliOptions& opt);          // one receding-horizon run
int cmd_tables(const CliOptions& opt);       // full sweep: six tables + summary
int cmd_check(const CliOptions& opt);        // embedded verification suite

}  // namespace rhc
