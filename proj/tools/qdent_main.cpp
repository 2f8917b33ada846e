// qdent_main.cpp - command-line entry point

#include <iostream>

#include "CLI11.hpp"

#include "app/commands.hpp"
#include "qdent/errors.hpp"

int main(int argc, char** argv)
{
    using namespace qdent::app;

    CLI::App cli{"QD/plasmon entanglement simulation and optimization"};
    cli.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;

    for (const char* name : {"simulate", "sweep", "optimize", "analytic"}) {
        CLI::App* sub = cli.add_subcommand(name);
        sub->add_option("--config", config_path, "key = value run configuration")->required();
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--seed", seed, "override the config seed");
        sub->add_option("--threads", threads, "worker threads (0 = all cores)");
    }

    try {
        cli.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return cli.exit(e);
    } catch (const CLI::ParseError& e) {
        cli.exit(e);
        return 2;
    }

    try {
        const Command command = parse_command(cli.get_subcommands().front()->get_name());
        const auto kv = KeyValueConfig::load(config_path);
        RunConfig rc = build_run_config(kv, command);
        if (seed) rc.seed = rc.optimize.multistart.seed = *seed;
        if (threads) rc.threads = rc.optimize.multistart.threads = *threads;
        const RunOutcome outcome = run(rc, out_dir);
        for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << '\n';
        for (const auto& f : outcome.files) std::cout << f.string() << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    }
}
