#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bohmsemi/io/runner.hpp"

int main(int argc, char** argv) {
    using namespace bohmsemi::io;
    CLI::App app{"Bohmian and semi-classical trajectory laboratory"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);

    std::string config_path, run_dir;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool plots = false;

    auto* run = app.add_subcommand("run", "Execute a scenario and write its artifacts");
    run->add_option("config", config_path, "Scenario configuration (JSON)")->required();
    run->add_flag("--plots", plots, "Also emit SVG figures");
    run->add_option("--seed", seed, "Override the configured seed");
    run->add_option("--out", out, "Output directory");
    run->add_option("--threads", threads, "Worker threads (default: BOHMSEMI_THREADS, then all cores)");

    auto* check = app.add_subcommand("check", "Validate a configuration without running it");
    check->add_option("config", config_path, "Scenario configuration (JSON)")->required();

    auto* figures = app.add_subcommand("figures", "Emit SVG figures for a finished run");
    figures->add_option("run_dir", run_dir, "Run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInvalid;
    }

    if (*run) return cli_run(config_path, {out, seed, threads, plots}, std::cout, std::cerr);
    if (*check) return cli_check(config_path, std::cout, std::cerr);
    return cli_figures(run_dir, std::cout, std::cerr);
}
