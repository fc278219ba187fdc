#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tieq/model_io.hpp"
#include "tieq/models.hpp"

// Writes the bundled example models as JSON model files.
int main(int argc, char** argv) {
    CLI::App app{"Bundled model generator"};
    std::string name;
    std::string out = "model.json";
    int nodes = 33;
    int states = 3;
    double factor = 0.7;
    std::uint64_t seed = 1;
    app.add_option("--name", name,
                   "one of: two-state-ct, entropy-only, direct-choice, random-dt, constant-dt, "
                   "constant-ct")
        ->required();
    app.add_option("--out", out, "output path");
    app.add_option("--nodes", nodes, "grid nodes per dimension");
    app.add_option("--states", states, "state count (random-dt, constant)");
    app.add_option("--factor", factor, "discount factor (direct-choice, random-dt)");
    app.add_option("--seed", seed, "random seed (random-dt)");
    CLI11_PARSE(app, argc, argv);

    try {
        tieq::ModelSpec model;
        if (name == "two-state-ct")
            model = tieq::models::two_state_switching(nodes);
        else if (name == "entropy-only")
            model = tieq::models::entropy_only_single_state(nodes);
        else if (name == "direct-choice")
            model = tieq::models::direct_choice_two_state(nodes, {}, factor);
        else if (name == "random-dt")
            model = tieq::models::random_dt_model(states, nodes, factor, seed);
        else if (name == "constant-dt")
            model = tieq::models::constant_model(states, nodes, tieq::Mode::dt);
        else if (name == "constant-ct")
            model = tieq::models::constant_model(states, nodes, tieq::Mode::ct);
        else {
            std::cerr << "unknown model name '" << name << "'\n";
            return 1;
        }
        tieq::save_model(model, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
