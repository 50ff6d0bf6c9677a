// Command-line front end: every subcommand reads a JSON config and writes
// CSV/JSON reports plus a manifest into the output directory.

#include <CLI11.hpp>

#include "mfgclaw/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mfgclaw - mean field games through scalar conservation laws"};
    app.require_subcommand(1);

    mfgclaw::CliOptions opts;
    const std::vector<std::string> names = {"riemann",      "characteristics", "equilibrium",
                                            "monotonicity", "select",          "viscosity",
                                            "nproj"};
    for (const auto& name : names) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", opts.config_path, "config JSON path")->required();
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--seed", opts.seed, "seed for sampled measures");
        sub->add_flag("--strict", opts.strict, "fail on flagged ambiguities");
    }

    CLI11_PARSE(app, argc, argv);
    return mfgclaw::run_command(app.get_subcommands().front()->get_name(), opts);
}
