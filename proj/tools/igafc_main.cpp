#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "igafc/config.hpp"
#include "igafc/runner.hpp"

using namespace igafc;

int main(int argc, char** argv) {
    CLI::App app{"High-resolution isogeometric convection-diffusion solver"};
    app.require_subcommand(1);

    std::string case_file;
    std::string out_dir = ".";
    std::optional<int> resolution;
    std::optional<double> force_alpha;
    std::optional<int> quadrature;
    std::optional<double> tolerance;
    bool no_limiter = false;
    bool serial = false;

    CLI::App* solve = app.add_subcommand("solve", "Solve a case description file");
    solve->add_option("case-file", case_file, "Case description (.case)")->required();
    solve->add_option("--out", out_dir, "Output directory (default: current directory)");
    solve->add_option("--resolution", resolution, "Export lattice resolution per direction");
    solve->add_option("--force-alpha", force_alpha, "Pin every limiter factor to 0 or 1")
        ->check(CLI::IsMember({0.0, 1.0}));
    solve->add_flag("--no-limiter", no_limiter, "Solve the linear low-order scheme");
    solve->add_option("--quadrature", quadrature, "Gauss points per direction per span");
    solve->add_option("--tol", tolerance, "Defect-correction tolerance");
    solve->add_flag("--serial", serial, "Run the serial reference kernels");

    CLI11_PARSE(app, argc, argv);

    ProblemConfig config;
    try {
        config = parse_config(case_file);
    } catch (const config_error& e) {
        std::cerr << e.what() << "\n";
        return exit_config_error;
    }

    RunOptions options;
    options.out_dir = out_dir;
    options.resolution = resolution;
    options.force_alpha = force_alpha;
    if (no_limiter) options.limiter = false;
    options.quadrature = quadrature;
    options.tolerance = tolerance;
    options.exec = serial ? Exec::serial : Exec::parallel;

    try {
        const RunResult result = run_case(config, options, std::cout);
        if (result.exit_code == exit_no_convergence)
            std::cerr << "defect correction did not converge within the iteration budget\n";
        else if (result.exit_code == exit_geometry_degenerate)
            std::cerr << "geometry validation failed\n";
        return result.exit_code;
    } catch (const stage_error& e) {
        std::cerr << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return exit_stage_failure;
    }
}
