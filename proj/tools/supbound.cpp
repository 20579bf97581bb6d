// supbound: tail bounds for suprema of dispersive-equation solutions with
// random initial conditions.
#include "supbound/commands.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Supremum tail bounds for spectral solutions of odd-order dispersive equations"};
    app.require_subcommand(1);

    std::string config;
    supbound::CommandOptions opts;
    std::string method;
    std::uint64_t seed = 0;
    std::string out_dir;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
        sub->add_option("--method", method, "auto, generic or closed")
            ->check(CLI::IsMember({"auto", "generic", "closed"}));
        sub->add_option("--seed", seed, "overrides sim.seed");
        sub->add_option("--out", out_dir, "output directory (overrides output_dir)");
    };
    for (const char* name : {"bound", "simulate", "verify", "all"}) {
        add_common(app.add_subcommand(name, std::string("run ") + name));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : supbound::kExitConfigError;
    }

    auto* sub = app.get_subcommands().front();
    if (sub->count("--method")) opts.method = method;
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--out")) opts.out_dir = out_dir;
    return supbound::run_command(sub->get_name(), config, opts, std::cout, std::cerr);
}
