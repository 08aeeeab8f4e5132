#include <CLI11.hpp>

#include "rhc/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Receding-horizon control toolkit for bilinear systems"};
    app.require_subcommand(1);

    rhc::CliOptions opt;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* cfg = sub->add_option("--config", opt.config_path,
                                    "configuration file (JSON)");
        if (needs_config) cfg->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--jobs", opt.jobs, "max concurrent solves")
            ->check(CLI::PositiveNumber);
        sub->add_option("--set", opt.overrides,
                        "dotted-path config override KEY=VALUE (repeatable)");
        sub->add_option("--format", opt.format, "table format")
            ->check(CLI::IsMember({"csv", "md"}));
    };

    CLI::App* riccati = app.add_subcommand(
        "riccati", "solve the algebraic Riccati equation of a system file");
    add_common(riccati, true);

    CLI::App* solve = app.add_subcommand(
        "solve", "solve one finite-horizon problem from a run config");
    add_common(solve, true);

    CLI::App* rhc_cmd = app.add_subcommand(
        "rhc", "run the receding-horizon loop from a run config");
    add_common(rhc_cmd, true);

    CLI::App* tables = app.add_subcommand(
        "tables", "run the (tau, T) sweep and export all six tables");
    add_common(tables, true);

    CLI::App* check = app.add_subcommand(
        "check", "run the embedded verification suite");
    add_common(check, false);

    CLI11_PARSE(app, argc, argv);

    if (riccati->parsed()) return rhc::cmd_riccati(opt);
    if (solve->parsed()) return rhc::cmd_solve(opt);
    if (rhc_cmd->parsed()) return rhc::cmd_rhc(opt);
    if (tables->parsed()) return rhc::cmd_tables(opt);
    if (check->parsed()) return rhc::cmd_check(opt);
    return rhc::kExitConfigError;
}
