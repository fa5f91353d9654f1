#include "igafc/export.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace igafc {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write output file: " + path.string());
    out << std::setprecision(17);
    return out;
}

} // namespace

std::string Diagnostics::to_text() const {
    std::ostringstream os;
    os << std::setprecision(10);
    os << "dofs: " << dofs << "\n";
    os << "peclet_xi: " << peclet.xi << "\n";
    os << "peclet_eta: " << peclet.eta << "\n";
    os << "peclet_max: " << peclet.max << "\n";
    os << "det_j_min: " << min_det_j << "\n";
    os << "det_j_max: " << max_det_j << "\n";
    os << std::setprecision(17);
    os << "u_min: " << u_min << "\n";
    os << "u_max: " << u_max << "\n";
    os << "iterations: " << iterations << "\n";
    os << "converged: " << (converged ? "yes" : "no") << "\n";
    os << "final_residual: " << final_residual << "\n";
    return os.str();
}

std::vector<double> sample_field(const TensorSplineSpace& space, const std::vector<double>& u,
                                 int resolution, Exec exec) {
    const int n = resolution;
    std::vector<double> samples(static_cast<std::size_t>(n) * n);

    auto sample_row = [&](int j) {
        const double eta = static_cast<double>(j) / (n - 1);
        for (int i = 0; i < n; ++i) {
            const double xi = static_cast<double>(i) / (n - 1);
            samples[static_cast<std::size_t>(j) * n + i] = eval_field(space, u, xi, eta);
        }
    };

    if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (int j = 0; j < n; ++j) sample_row(j);
        return samples;
#endif
    }
    for (int j = 0; j < n; ++j) sample_row(j);
    return samples;
}

void export_solution(const std::vector<double>& u, const TensorSplineSpace& space,
                     const GeometryMap& geom, int resolution, const OutputConfig& formats,
                     const Diagnostics& diag, const std::string& out_dir) {
    namespace fs = std::filesystem;
    const fs::path dir(out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);

    const int n = resolution;

    if (formats.vtk) {
        // Geometry and field are sampled at identical lattice parameters.
        const std::vector<double> field = sample_field(space, u, n, Exec::parallel);
        std::ofstream out = open_output(dir / "solution.vtk");
        out << "# vtk DataFile Version 3.0\n";
        out << "igafc solution field\n";
        out << "ASCII\n";
        out << "DATASET STRUCTURED_GRID\n";
        out << "DIMENSIONS " << n << " " << n << " 1\n";
        out << "POINTS " << n * n << " double\n";
        for (int j = 0; j < n; ++j) {
            const double eta = static_cast<double>(j) / (n - 1);
            for (int i = 0; i < n; ++i) {
                const double xi = static_cast<double>(i) / (n - 1);
                const Vec2 x = geom.eval(xi, eta);
                out << x.x << " " << x.y << " 0\n";
            }
        }
        out << "POINT_DATA " << n * n << "\n";
        out << "SCALARS u double 1\n";
        out << "LOOKUP_TABLE default\n";
        for (double v : field) out << v << "\n";
    }

    if (formats.csv) {
        std::ofstream out = open_output(dir / "coeffs.csv");
        out << "dof,a,b,greville_xi,greville_eta,coefficient\n";
        for (int j = 0; j < space.num_dofs(); ++j) {
            const auto [a, b] = space.tensor_index(j);
            const Vec2 g = space.greville(j);
            out << j << "," << a << "," << b << "," << g.x << "," << g.y << "," << u[j] << "\n";
        }
    }

    if (formats.report) {
        std::ofstream out = open_output(dir / "report.txt");
        out << diag.to_text();
    }
}

} // namespace igafc
