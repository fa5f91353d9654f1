#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "igafc/common.hpp"

namespace igafc {

/// Piecewise-constant profile table over [0, 1]: values[k] on
/// [breaks[k], breaks[k+1]), the last interval closed.
struct ProfileTable {
    std::vector<double> breaks;
    std::vector<double> values;

    double eval(double t) const;
    bool operator==(const ProfileTable&) const = default;
};

/// Boundary profile: the built-in parametric step of the benchmark problem
/// (1 below the line eta = (1 - xi)/5, 0 above) or a piecewise-constant table
/// per edge.
struct BoundaryConfig {
    enum class Kind { paper_step, table };
    Kind kind = Kind::paper_step;
    std::array<ProfileTable, 4> edges;   ///< indexed by Edge: bottom, right, top, left

    bool operator==(const BoundaryConfig&) const = default;
};

struct GeometryConfig {
    int degree = 2;
    std::vector<double> knots_xi;
    std::vector<double> knots_eta;
    std::vector<Vec2> control_net;   ///< row-major in xi

    bool operator==(const GeometryConfig& o) const {
        if (degree != o.degree || knots_xi != o.knots_xi || knots_eta != o.knots_eta) return false;
        if (control_net.size() != o.control_net.size()) return false;
        for (std::size_t i = 0; i < control_net.size(); ++i)
            if (control_net[i].x != o.control_net[i].x || control_net[i].y != o.control_net[i].y)
                return false;
        return true;
    }
};

struct RefinementConfig {
    int target_basis_xi = 0;
    int target_basis_eta = 0;
    bool operator==(const RefinementConfig&) const = default;
};

struct PhysicsConfig {
    double diffusion = 0.0;
    Vec2 velocity;
    double source_constant = 0.0;   ///< "zero" parses to 0

    bool operator==(const PhysicsConfig& o) const {
        return diffusion == o.diffusion && velocity.x == o.velocity.x &&
               velocity.y == o.velocity.y && source_constant == o.source_constant;
    }
};

struct SolverConfig {
    double tolerance = 1e-8;
    int max_iterations = 500;
    double relaxation = 1.0;
    int quadrature = 3;
    bool limiter = true;
    std::optional<double> force_alpha;
    bool operator==(const SolverConfig&) const = default;
};

struct OutputConfig {
    int resolution = 101;
    bool vtk = true;
    bool csv = true;
    bool report = true;
    bool operator==(const OutputConfig&) const = default;
};

/// Full case description, one benchmark run per file.
struct ProblemConfig {
    GeometryConfig geometry;
    RefinementConfig refinement;
    PhysicsConfig physics;
    BoundaryConfig boundary;
    SolverConfig solver;
    OutputConfig output;

    bool operator==(const ProblemConfig&) const = default;

    /// Profile value at a parametric boundary point.
    double boundary_profile(double xi, double eta) const;
};

/// Parse and validate a case file. Unknown keys, missing fields, malformed
/// numbers and inconsistent sizes all raise config_error carrying every
/// problem found.
ProblemConfig parse_config(const std::string& path);
ProblemConfig parse_config_text(const std::string& text);

/// Serialize a config back to case-file text; parse(write(c)) == c.
std::string write_config(const ProblemConfig& config);

} // namespace igafc
