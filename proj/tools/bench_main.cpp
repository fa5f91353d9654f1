// Benchmark comparing the serial reference kernels against the OpenMP path:
// operator assembly, limiter sweeps, sparse matrix-vector products and field
// sampling. The two paths must agree bitwise; the max |diff| column checks it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "igafc/afc.hpp"
#include "igafc/assembly.hpp"
#include "igafc/export.hpp"
#include "igafc/geometry.hpp"
#include "igafc/quadrature.hpp"

using namespace igafc;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_best(int repeats, F&& f) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const double t0 = now_ms();
        f();
        best = std::min(best, now_ms() - t0);
    }
    return best;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

GeometryMap deformed_geometry(int basis, int degree) {
    const KnotVector kv({0, 0, 0, 0.5, 1, 1, 1}, 2);
    const TensorSplineSpace coarse(kv, kv);
    const std::vector<Vec2> net = {
        {0, 0},     {0.33, -0.2}, {0.66, 0},   {1, 0},        //
        {-0.2, 0.33}, {0.4, 0.33}, {0.66, 0.33}, {1, 0.33},   //
        {0, 0.66},  {0.33, 0.9},  {0.66, 0.9}, {1.2, 0.66},   //
        {0, 1},     {0.33, 1},    {0.66, 1},   {1, 1}};
    GeometryMap geom(coarse, net);
    if (degree != 2) {
        // Rebuild on a uniform space of the requested degree via Greville
        // points of the deformed image (close enough for kernel timing).
        const KnotVector kd = KnotVector::uniform(basis, degree);
        const TensorSplineSpace space(kd, kd);
        std::vector<Vec2> pts(static_cast<std::size_t>(space.num_dofs()));
        for (int j = 0; j < space.num_dofs(); ++j) {
            const Vec2 g = space.greville(j);
            pts[j] = geom.eval(g.x, g.y);
        }
        return GeometryMap(space, pts);
    }
    return geom.refined(basis, basis);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Serial vs OpenMP kernel benchmark"};
    int basis = 66;
    int degree = 2;
    int quadrature = 3;
    int repeats = 3;
    int threads = 0;
    app.add_option("--basis", basis, "Basis functions per direction");
    app.add_option("--degree", degree, "Spline degree");
    app.add_option("--quadrature", quadrature, "Gauss points per direction per span");
    app.add_option("--repeat", repeats, "Repetitions per kernel (best time wins)");
    app.add_option("--threads", threads, "OpenMP thread count (0 = runtime default)");
    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
    std::printf("OpenMP enabled, max threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both columns run the serial kernels\n");
#endif

    const GeometryMap geom = deformed_geometry(basis, degree);
    const TensorSplineSpace& space = geom.space();
    const QuadratureRule quad = make_quadrature(space, quadrature);
    std::printf("space: %dx%d (degree %d), %d DOFs, %d quadrature blocks\n\n", space.num_xi(),
                space.num_eta(), degree, space.num_dofs(), quad.num_blocks());

    const Vec2 v{std::sqrt(2.0), std::sqrt(2.0)};
    const VelocityField vel = [v](Vec2) { return v; };

    std::printf("%-22s %12s %12s %9s %12s\n", "kernel", "serial [ms]", "openmp [ms]", "speedup",
                "max |diff|");

    auto report = [&](const char* name, double ts, double tp, double diff) {
        std::printf("%-22s %12.2f %12.2f %8.2fx %12.3g\n", name, ts, tp, ts / tp, diff);
    };

    {
        SparseOperator ks = assemble_convection(space, geom, quad, vel, Exec::serial);
        SparseOperator kp = assemble_convection(space, geom, quad, vel, Exec::parallel);
        const double ts =
            time_best(repeats, [&] { ks = assemble_convection(space, geom, quad, vel, Exec::serial); });
        const double tp = time_best(
            repeats, [&] { kp = assemble_convection(space, geom, quad, vel, Exec::parallel); });
        report("assemble convection", ts, tp, max_abs_diff(ks.values(), kp.values()));
    }
    {
        SparseOperator ss = assemble_diffusion(space, geom, quad, 1e-4, Exec::serial);
        SparseOperator sp = assemble_diffusion(space, geom, quad, 1e-4, Exec::parallel);
        const double ts = time_best(
            repeats, [&] { ss = assemble_diffusion(space, geom, quad, 1e-4, Exec::serial); });
        const double tp = time_best(
            repeats, [&] { sp = assemble_diffusion(space, geom, quad, 1e-4, Exec::parallel); });
        report("assemble diffusion", ts, tp, max_abs_diff(ss.values(), sp.values()));
    }
    {
        SparseOperator ms = assemble_mass(space, geom, quad, Exec::serial);
        SparseOperator mp = assemble_mass(space, geom, quad, Exec::parallel);
        const double ts =
            time_best(repeats, [&] { ms = assemble_mass(space, geom, quad, Exec::serial); });
        const double tp =
            time_best(repeats, [&] { mp = assemble_mass(space, geom, quad, Exec::parallel); });
        report("assemble mass", ts, tp, max_abs_diff(ms.values(), mp.values()));
    }

    const SparseOperator K = assemble_convection(space, geom, quad, vel, Exec::parallel);
    const SparseOperator D = build_discrete_diffusion(K);
    const SparseOperator L = low_order_operator(K, D);
    const EdgeSet edges = EdgeSet::build(L, D);

    std::mt19937_64 rng(20240901);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> u(static_cast<std::size_t>(space.num_dofs()));
    for (double& x : u) x = dist(rng);

    {
        LimiterWorkspace ws, wp;
        LimiterResult rs = limited_antidiffusion(edges, u, ws, Exec::serial);
        LimiterResult rp = limited_antidiffusion(edges, u, wp, Exec::parallel);
        const double ts = time_best(repeats * 20, [&] {
            rs = limited_antidiffusion(edges, u, ws, Exec::serial);
        });
        const double tp = time_best(repeats * 20, [&] {
            rp = limited_antidiffusion(edges, u, wp, Exec::parallel);
        });
        report("limiter sweep", ts, tp, max_abs_diff(rs.correction, rp.correction));
    }
    {
        std::vector<double> ys = L.apply(u, Exec::serial);
        std::vector<double> yp = L.apply(u, Exec::parallel);
        const double ts = time_best(repeats * 20, [&] { ys = L.apply(u, Exec::serial); });
        const double tp = time_best(repeats * 20, [&] { yp = L.apply(u, Exec::parallel); });
        report("sparse matvec", ts, tp, max_abs_diff(ys, yp));
    }
    {
        std::vector<double> fs = sample_field(space, u, 201, Exec::serial);
        std::vector<double> fp = sample_field(space, u, 201, Exec::parallel);
        const double ts = time_best(repeats, [&] { fs = sample_field(space, u, 201, Exec::serial); });
        const double tp =
            time_best(repeats, [&] { fp = sample_field(space, u, 201, Exec::parallel); });
        report("field sampling (201^2)", ts, tp, max_abs_diff(fs, fp));
    }

    return 0;
}
