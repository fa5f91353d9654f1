#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>

#include "igafc/config.hpp"
#include "igafc/export.hpp"

namespace igafc {

/// Process exit codes of the case driver.
enum ExitCode : int {
    exit_ok = 0,
    exit_stage_failure = 1,
    exit_no_convergence = 2,
    exit_config_error = 3,
    exit_geometry_degenerate = 4,
};

/// A pipeline stage aborted; carries the stage name and the exit code the
/// driver should report (geometry degeneracy keeps its dedicated code).
class stage_error : public std::runtime_error {
public:
    stage_error(std::string stage, const std::string& what, int exit_code)
        : std::runtime_error("stage '" + stage + "' failed: " + what),
          stage_(std::move(stage)),
          exit_code_(exit_code) {}

    const std::string& stage() const { return stage_; }
    int exit_code() const { return exit_code_; }

private:
    std::string stage_;
    int exit_code_;
};

struct RunResult {
    SolveReport report;
    Diagnostics diagnostics;
    int exit_code = exit_ok;
};

struct RunOptions {
    std::string out_dir = ".";
    std::optional<int> resolution;           ///< overrides output.resolution
    std::optional<double> force_alpha;       ///< overrides solver.force_alpha
    std::optional<bool> limiter;             ///< overrides solver.limiter
    std::optional<int> quadrature;           ///< overrides solver.quadrature
    std::optional<double> tolerance;         ///< overrides solver.tolerance
    Exec exec = Exec::parallel;
    bool write_outputs = true;
};

/// Execute a case end to end: refine, validate bijectivity, assemble, AFC
/// setup, project/apply Dirichlet data, solve, export. Stage failures abort
/// with the stage name and cause; non-convergence still writes outputs and
/// returns exit_no_convergence.
RunResult run_case(const ProblemConfig& config, const RunOptions& options, std::ostream& log);

} // namespace igafc
