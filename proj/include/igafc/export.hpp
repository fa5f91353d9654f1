#pragma once

#include <string>
#include <vector>

#include "igafc/config.hpp"
#include "igafc/geometry.hpp"
#include "igafc/solver.hpp"

namespace igafc {

/// Per-run diagnostics printed to stdout and written to report.txt.
struct Diagnostics {
    int dofs = 0;
    PecletNumber peclet;
    double min_det_j = 0.0;
    double max_det_j = 0.0;
    double u_min = 0.0;
    double u_max = 0.0;
    int iterations = 0;
    bool converged = false;
    double final_residual = 0.0;

    std::string to_text() const;
};

/// Write the solution field sampled on a uniform resolution x resolution
/// parametric lattice (geometry and field sampled at identical parameters):
///  - solution.vtk   legacy-ASCII structured grid
///  - coeffs.csv     DOF index, tensor indices, Greville anchor, coefficient
///  - report.txt     diagnostics block
/// Throws std::runtime_error when a file cannot be written.
void export_solution(const std::vector<double>& u, const TensorSplineSpace& space,
                     const GeometryMap& geom, int resolution, const OutputConfig& formats,
                     const Diagnostics& diag, const std::string& out_dir);

/// Sample the solution field on the export lattice (parallel kernel).
std::vector<double> sample_field(const TensorSplineSpace& space, const std::vector<double>& u,
                                 int resolution, Exec exec = Exec::serial);

} // namespace igafc
