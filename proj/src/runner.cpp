#include "igafc/runner.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>

#include "igafc/afc.hpp"
#include "igafc/assembly.hpp"
#include "igafc/geometry.hpp"
#include "igafc/quadrature.hpp"
#include "igafc/solver.hpp"

namespace igafc {

namespace {

[[noreturn]] void stage_failure(const std::string& stage, const std::exception& cause) {
    const int code = dynamic_cast<const singular_map_error*>(&cause) ? exit_geometry_degenerate
                                                                     : exit_stage_failure;
    throw stage_error(stage, cause.what(), code);
}

} // namespace

RunResult run_case(const ProblemConfig& config, const RunOptions& options, std::ostream& log) {
    const SolverConfig scfg = config.solver;
    const double tolerance = options.tolerance.value_or(scfg.tolerance);
    const int quadrature = options.quadrature.value_or(scfg.quadrature);
    const bool limiter = options.limiter.value_or(scfg.limiter);
    const std::optional<double> force_alpha =
        options.force_alpha.has_value() ? options.force_alpha : scfg.force_alpha;
    const int resolution = options.resolution.value_or(config.output.resolution);

    RunResult result;

    // Refinement: knot insertion preserves the geometry exactly, so the same
    // refined space carries both the geometry and the solution.
    GeometryMap geom = [&] {
        try {
            const TensorSplineSpace coarse(KnotVector(config.geometry.knots_xi, config.geometry.degree),
                                           KnotVector(config.geometry.knots_eta, config.geometry.degree));
            const GeometryMap coarse_map(coarse, config.geometry.control_net);
            return coarse_map.refined(config.refinement.target_basis_xi,
                                      config.refinement.target_basis_eta);
        } catch (const std::exception& e) {
            stage_failure("refine", e);
        }
    }();
    const TensorSplineSpace& space = geom.space();

    const QuadratureRule quad = [&] {
        try {
            return make_quadrature(space, quadrature);
        } catch (const std::exception& e) {
            stage_failure("quadrature", e);
        }
    }();

    BijectivityReport bij;
    try {
        bij = geom.validate_bijectivity(33, &quad);
    } catch (const std::exception& e) {
        stage_failure("bijectivity", e);
    }
    if (!bij.passed) {
        std::ostringstream os;
        os << "geometry map is not bijective: min det J = " << bij.min_det << " at (xi, eta) = ("
           << bij.argmin.x << ", " << bij.argmin.y << ")";
        log << os.str() << "\n";
        result.exit_code = exit_geometry_degenerate;
        result.diagnostics.min_det_j = bij.min_det;
        result.diagnostics.max_det_j = bij.max_det;
        return result;
    }

    const Vec2 velocity = config.physics.velocity;
    const double source = config.physics.source_constant;

    SparseOperator K = [&] {
        try {
            return assemble_convection(space, geom, quad, [velocity](Vec2) { return velocity; },
                                       options.exec);
        } catch (const std::exception& e) {
            stage_failure("assemble convection", e);
        }
    }();
    SparseOperator S = [&] {
        try {
            return assemble_diffusion(space, geom, quad, config.physics.diffusion, options.exec);
        } catch (const std::exception& e) {
            stage_failure("assemble diffusion", e);
        }
    }();
    std::vector<double> rhs = [&] {
        try {
            return assemble_rhs(space, geom, quad, [source](Vec2) { return source; }, options.exec);
        } catch (const std::exception& e) {
            stage_failure("assemble rhs", e);
        }
    }();

    SparseOperator D = build_discrete_diffusion(K);
    SparseOperator L = low_order_operator(K, D);

    BoundaryValues bc = [&] {
        try {
            return project_dirichlet(
                geom, [&config](double xi, double eta) { return config.boundary_profile(xi, eta); },
                quadrature);
        } catch (const std::exception& e) {
            stage_failure("dirichlet projection", e);
        }
    }();

    DefectCorrectionParams params;
    params.tolerance = tolerance;
    params.max_iterations = scfg.max_iterations;
    params.relaxation = scfg.relaxation;
    params.limiter = limiter;
    params.force_alpha = force_alpha;
    params.exec = options.exec;

    try {
        result.report = defect_correction_solve(space, S, L, K, rhs, bc, params);
    } catch (const std::exception& e) {
        stage_failure("solve", e);
    }

    Diagnostics& diag = result.diagnostics;
    diag.dofs = space.num_dofs();
    if (config.physics.diffusion > 0.0)
        diag.peclet = peclet_number(config.physics.diffusion, velocity, space);
    diag.min_det_j = bij.min_det;
    diag.max_det_j = bij.max_det;
    diag.u_min = result.report.u_min;
    diag.u_max = result.report.u_max;
    diag.iterations = result.report.iterations;
    diag.converged = result.report.converged;
    diag.final_residual =
        result.report.residual_history.empty() ? 0.0 : result.report.residual_history.back();

    log << diag.to_text();

    if (options.write_outputs) {
        try {
            export_solution(result.report.solution, space, geom, resolution, config.output, diag,
                            options.out_dir);
        } catch (const std::exception& e) {
            stage_failure("export", e);
        }
    }

    if (!result.report.converged) result.exit_code = exit_no_convergence;
    return result;
}

} // namespace igafc
