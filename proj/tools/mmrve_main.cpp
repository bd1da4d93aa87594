#include <CLI11.hpp>
#include <iostream>

#include "mmrve/runner.hpp"
#include "mmrve/version.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mmrve: coupled magneto-mechanical RVE homogenization"};
    app.set_version_flag("--version", std::string("mmrve ") + mmrve::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    int steps_override = 0;
    std::string output_override;
    std::string linear_solver;
    bool vtk = false;
    bool verbose = false;
    bool dump_constraints = false;

    CLI::App* run = app.add_subcommand("run", "run a configured load path");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--steps", steps_override, "override [load] steps");
    run->add_option("--output", output_override, "override [output] csv path");
    run->add_flag("--vtk", vtk, "write a VTK series");
    run->add_flag("--verbose", verbose, "per-iteration solver log");
    run->add_option("--linear-solver", linear_solver, "direct|iterative")
        ->check(CLI::IsMember({"direct", "iterative"}));
    run->add_flag("--dump-constraints", dump_constraints, "print the affine constraint set");

    CLI::App* oracle = app.add_subcommand("oracle", "print small-strain coefficient table");
    oracle->add_option("config", config_path, "config file")->required();

    CLI::App* check = app.add_subcommand("check", "run the built-in invariant suite");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(check)) return mmrve::run_check(std::cout);

        mmrve::RunConfig config = mmrve::parse_config_file(config_path);
        if (app.got_subcommand(oracle)) return mmrve::run_oracle(config, std::cout);

        if (steps_override > 0) config.load.steps = steps_override;
        if (!output_override.empty()) config.output.csv = output_override;
        if (vtk) config.output.vtk = true;
        if (verbose) config.output.verbosity = 1;
        if (dump_constraints) config.output.dump_constraints = true;
        if (linear_solver == "direct") config.solver.backend = mmrve::LinearBackend::Direct;
        if (linear_solver == "iterative") config.solver.backend = mmrve::LinearBackend::Iterative;

        return mmrve::run_simulation(config, std::cout);
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}
