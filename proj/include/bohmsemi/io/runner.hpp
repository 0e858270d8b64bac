#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bohmsemi/io/config.hpp"

namespace bohmsemi::io {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitInvalid = 2,
    kExitBudget = 3,
};

struct RunOptions {
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool plots = false;
};

/// --threads, else BOHMSEMI_THREADS, else the hardware concurrency. Throws ConfigError
/// for a malformed environment value.
unsigned resolve_threads(std::optional<unsigned> flag);

struct RunReport {
    std::string directory;
    std::size_t flagged_steps = 0;
    bool budget_exceeded = false;
    std::vector<std::string> artifacts;  // relative to directory
    std::vector<std::string> warnings;
    nlohmann::json checks = nlohmann::json::array();
    nlohmann::json flag_counts = nlohmann::json::object();
};

/// Executes the scenario into `dir` (created if needed) and writes manifest.json last.
RunReport run_scenario(const ScenarioConfig& cfg, const std::string& dir, unsigned threads, bool plots);

/// SVG files for whatever the run directory holds; returns their paths. Throws MissingData.
std::vector<std::string> emit_figures(const std::string& run_dir);

/// Subcommand entry points; return the process exit status and report on the streams.
int cli_run(const std::string& config_path, const RunOptions& options, std::ostream& out, std::ostream& err);
int cli_check(const std::string& config_path, std::ostream& out, std::ostream& err);
int cli_figures(const std::string& run_dir, std::ostream& out, std::ostream& err);

}  // namespace bohmsemi::io
