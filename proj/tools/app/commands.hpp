// commands.hpp - the simulate, sweep, optimize and analytic entry points

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"

namespace qdent::app {

struct RunOutcome {
    std::vector<std::filesystem::path> files;
    std::vector<std::string> warnings;  // reported on stderr, do not change the exit code
};

/// "# qdent <version>", command, config hash and seed. No timestamps, so
/// identical inputs give byte-identical files.
std::vector<std::string> provenance_header(const RunConfig& rc);

/// Runs the configured command and writes its CSV files into out_dir. All
/// computation happens before the first file is created.
RunOutcome run(const RunConfig& rc, const std::filesystem::path& out_dir);

RunOutcome run_simulate(const RunConfig& rc, const std::filesystem::path& out_dir);
RunOutcome run_sweep(const RunConfig& rc, const std::filesystem::path& out_dir);
RunOutcome run_optimize(const RunConfig& rc, const std::filesystem::path& out_dir);
RunOutcome run_analytic(const RunConfig& rc, const std::filesystem::path& out_dir);

/// Maps an exception from a run to the process exit code: 2 for
/// configuration errors, 3 for numerical failures, 1 otherwise.
int exit_code_for(const std::exception& e);

} // namespace qdent::app
