#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tieq/errors.hpp"
#include "tieq/run.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Relaxed-equilibrium solver for time-inconsistent Markov decision processes"};
    app.require_subcommand(1);

    struct SubArgs {
        std::string config;
        std::string out;
    };
    const std::vector<std::pair<std::string, tieq::Command>> commands = {
        {"solve", tieq::Command::solve},   {"anneal", tieq::Command::anneal},
        {"bridge", tieq::Command::bridge}, {"verify", tieq::Command::verify},
        {"scan", tieq::Command::scan},
    };
    std::vector<SubArgs> args(commands.size());
    for (std::size_t c = 0; c < commands.size(); ++c) {
        CLI::App* sub = app.add_subcommand(commands[c].first);
        sub->add_option("--config", args[c].config, "run configuration file")->required();
        sub->add_option("--out", args[c].out, "output directory (overrides the config)");
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t c = 0; c < commands.size(); ++c) {
        if (!app.get_subcommand(commands[c].first)->parsed()) continue;
        try {
            const tieq::RunConfig cfg =
                tieq::load_run_config(args[c].config, commands[c].second, args[c].out);
            return tieq::run(cfg);
        } catch (const tieq::ConfigError& e) {
            std::cerr << "config error at '" << e.pointer() << "': " << e.what() << "\n";
            return 1;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return 1;
        }
    }
    return 1;
}
