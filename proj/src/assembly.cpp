#include "igafc/assembly.hpp"

#include <algorithm>
#include <exception>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace igafc {

namespace {

// 1D basis values and first derivatives tabulated at every quadrature node of
// one direction. Nodes are flattened span-major: node = span_index * q + g.
struct DirTable {
    int p = 0;
    int q = 0;
    std::vector<int> first;      // first active basis function, per node
    std::vector<double> val;     // [node * (p+1) + j]
    std::vector<double> der;

    int stride() const { return p + 1; }
};

DirTable tabulate(const KnotVector& kv, const SpanQuadrature& sq) {
    DirTable t;
    t.p = kv.degree();
    t.q = sq.points_per_span();
    const std::size_t nodes = sq.spans().size() * static_cast<std::size_t>(t.q);
    t.first.resize(nodes);
    t.val.resize(nodes * (t.p + 1));
    t.der.resize(nodes * (t.p + 1));
    std::size_t node = 0;
    for (const auto& span : sq.spans()) {
        for (int g = 0; g < t.q; ++g, ++node) {
            const BasisSpan bs = kv.eval_basis_derivs(span.nodes[g], 1);
            t.first[node] = bs.first();
            for (int j = 0; j <= t.p; ++j) {
                t.val[node * (t.p + 1) + j] = bs.values[j];
                t.der[node * (t.p + 1) + j] = bs.derivs[0][j];
            }
        }
    }
    return t;
}

// Shared per-assembly state: tabulated solution and geometry bases plus the
// geometry control net, enough to evaluate x, J, det J and G at any node pair.
struct Tables {
    const TensorSplineSpace& space;
    const GeometryMap& geom;
    const QuadratureRule& quad;
    DirTable sol_x, sol_e;
    DirTable geo_x, geo_e;

    Tables(const TensorSplineSpace& s, const GeometryMap& g, const QuadratureRule& qr)
        : space(s),
          geom(g),
          quad(qr),
          sol_x(tabulate(s.xi(), qr.xi())),
          sol_e(tabulate(s.eta(), qr.eta())),
          geo_x(tabulate(g.space().xi(), qr.xi())),
          geo_e(tabulate(g.space().eta(), qr.eta())) {}

    struct PointGeometry {
        Mat2 J;
        double det;
        Mat2 G;
        Vec2 x;
    };

    PointGeometry geometry_at(int node_x, int node_e, double xi, double eta) const {
        const auto& net = geom.control_points();
        const TensorSplineSpace& gs = geom.space();
        const int px = geo_x.p;
        const int pe = geo_e.p;
        const int fx = geo_x.first[node_x];
        const int fe = geo_e.first[node_e];

        Vec2 x, d_xi, d_eta;
        for (int jb = 0; jb <= pe; ++jb) {
            const double ve = geo_e.val[node_e * (pe + 1) + jb];
            const double de = geo_e.der[node_e * (pe + 1) + jb];
            for (int ja = 0; ja <= px; ++ja) {
                const double vx = geo_x.val[node_x * (px + 1) + ja];
                const double dx = geo_x.der[node_x * (px + 1) + ja];
                const Vec2 c = net[gs.flat_index(fx + ja, fe + jb)];
                x += (vx * ve) * c;
                d_xi += (dx * ve) * c;
                d_eta += (vx * de) * c;
            }
        }

        PointGeometry out;
        out.J = Mat2{d_xi.x, d_eta.x, d_xi.y, d_eta.y};
        out.det = out.J.det();
        if (std::abs(out.det) < 1e-12) throw singular_map_error(xi, eta, out.det);
        const Mat2 adj = out.J.adjugate();
        const Mat2 gg = adj * adj.transpose();
        const double s = 1.0 / std::abs(out.det);
        out.G = Mat2{gg.a11 * s, gg.a12 * s, gg.a21 * s, gg.a22 * s};
        out.x = x;
        return out;
    }
};

// Runs `block_fn(block_index)` for every span rectangle, then `scatter_fn` in
// ascending block order. Under Exec::parallel the block phase is an OpenMP
// loop over fixed-size chunks; the serialized scatter keeps results bitwise
// independent of the thread count.
template <typename BlockFn, typename ScatterFn>
void run_blocks(int num_blocks, Exec exec, BlockFn&& block_fn, ScatterFn&& scatter_fn) {
    constexpr int chunk = 512;
    std::exception_ptr failure;

    for (int begin = 0; begin < num_blocks; begin += chunk) {
        const int end = std::min(begin + chunk, num_blocks);
        if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
            for (int bl = begin; bl < end; ++bl) {
                try {
                    block_fn(bl);
                } catch (...) {
#pragma omp critical
                    if (!failure) failure = std::current_exception();
                }
            }
#else
            for (int bl = begin; bl < end; ++bl) block_fn(bl);
#endif
        } else {
            for (int bl = begin; bl < end; ++bl) block_fn(bl);
        }
        if (failure) std::rethrow_exception(failure);
        for (int bl = begin; bl < end; ++bl) scatter_fn(bl);
    }
}

} // namespace

SparseOperator assemble_convection(const TensorSplineSpace& space, const GeometryMap& geom,
                                   const QuadratureRule& quad, const VelocityField& velocity,
                                   Exec exec) {
    const Tables tb(space, geom, quad);
    const auto& sx = quad.xi().spans();
    const auto& se = quad.eta().spans();
    const int nbx = static_cast<int>(sx.size());
    const int q = quad.points_per_direction();
    const int lx = tb.sol_x.stride();
    const int le = tb.sol_e.stride();
    const int nloc = lx * le;

    // Group-formulation coefficients: velocity at the physical image of each
    // DOF's Greville anchor.
    std::vector<Vec2> v_anchor(static_cast<std::size_t>(space.num_dofs()));
    for (int j = 0; j < space.num_dofs(); ++j) {
        const Vec2 g = space.greville(j);
        v_anchor[j] = velocity(geom.eval(g.x, g.y));
    }

    const int num_blocks = static_cast<int>(sx.size() * se.size());
    std::vector<std::vector<Vec2>> local(static_cast<std::size_t>(num_blocks));

    SparseOperator K(SparsityPattern::tensor_overlap(space));

    run_blocks(
        num_blocks, exec,
        [&](int bl) {
            const int bx = bl % nbx;
            const int be = bl / nbx;
            auto& c = local[bl];
            c.assign(static_cast<std::size_t>(nloc) * nloc, Vec2{});
            std::vector<Vec2> grad(static_cast<std::size_t>(nloc));
            for (int ge = 0; ge < q; ++ge) {
                const int node_e = be * q + ge;
                for (int gx = 0; gx < q; ++gx) {
                    const int node_x = bx * q + gx;
                    const auto pg = tb.geometry_at(node_x, node_e, sx[bx].nodes[gx],
                                                   se[be].nodes[ge]);
                    const double w = sx[bx].weights[gx] * se[be].weights[ge] * std::abs(pg.det);
                    // Physical gradient: J^-T grad_par = adj(J)^T grad_par / det.
                    const Mat2 jinv_t = {pg.J.a22 / pg.det, -pg.J.a21 / pg.det,
                                         -pg.J.a12 / pg.det, pg.J.a11 / pg.det};
                    for (int jb = 0; jb < le; ++jb)
                        for (int ja = 0; ja < lx; ++ja) {
                            const Vec2 gpar = {
                                tb.sol_x.der[node_x * lx + ja] * tb.sol_e.val[node_e * le + jb],
                                tb.sol_x.val[node_x * lx + ja] * tb.sol_e.der[node_e * le + jb]};
                            grad[jb * lx + ja] = jinv_t * gpar;
                        }
                    for (int i = 0; i < nloc; ++i) {
                        const double phi_i =
                            w * tb.sol_x.val[node_x * lx + i % lx] * tb.sol_e.val[node_e * le + i / lx];
                        for (int j = 0; j < nloc; ++j) c[i * nloc + j] += phi_i * grad[j];
                    }
                }
            }
        },
        [&](int bl) {
            const int bx = bl % nbx;
            const int be = bl / nbx;
            const int fx = tb.sol_x.first[bx * q];
            const int fe = tb.sol_e.first[be * q];
            const auto& c = local[bl];
            for (int i = 0; i < nloc; ++i) {
                const int gi = space.flat_index(fx + i % lx, fe + i / lx);
                for (int j = 0; j < nloc; ++j) {
                    const int gj = space.flat_index(fx + j % lx, fe + j / lx);
                    K.at(gi, gj) += -v_anchor[gj].dot(c[i * nloc + j]);
                }
            }
            local[bl].clear();
            local[bl].shrink_to_fit();
        });

    return K;
}

SparseOperator assemble_diffusion(const TensorSplineSpace& space, const GeometryMap& geom,
                                  const QuadratureRule& quad, double diffusion, Exec exec) {
    if (diffusion < 0.0) throw std::invalid_argument("assemble_diffusion: negative coefficient");

    const Tables tb(space, geom, quad);
    const auto& sx = quad.xi().spans();
    const auto& se = quad.eta().spans();
    const int nbx = static_cast<int>(sx.size());
    const int q = quad.points_per_direction();
    const int lx = tb.sol_x.stride();
    const int le = tb.sol_e.stride();
    const int nloc = lx * le;

    const int num_blocks = static_cast<int>(sx.size() * se.size());
    std::vector<std::vector<double>> local(static_cast<std::size_t>(num_blocks));

    SparseOperator S(SparsityPattern::tensor_overlap(space));

    run_blocks(
        num_blocks, exec,
        [&](int bl) {
            const int bx = bl % nbx;
            const int be = bl / nbx;
            auto& s = local[bl];
            s.assign(static_cast<std::size_t>(nloc) * nloc, 0.0);
            std::vector<Vec2> gpar(static_cast<std::size_t>(nloc));
            for (int ge = 0; ge < q; ++ge) {
                const int node_e = be * q + ge;
                for (int gx = 0; gx < q; ++gx) {
                    const int node_x = bx * q + gx;
                    const auto pg = tb.geometry_at(node_x, node_e, sx[bx].nodes[gx],
                                                   se[be].nodes[ge]);
                    const double w = sx[bx].weights[gx] * se[be].weights[ge] * diffusion;
                    for (int jb = 0; jb < le; ++jb)
                        for (int ja = 0; ja < lx; ++ja)
                            gpar[jb * lx + ja] = {
                                tb.sol_x.der[node_x * lx + ja] * tb.sol_e.val[node_e * le + jb],
                                tb.sol_x.val[node_x * lx + ja] * tb.sol_e.der[node_e * le + jb]};
                    // Parametric gradients against the geometric factor; the
                    // integrand is symmetric in (i, j), so fill both triangles
                    // from one product.
                    for (int i = 0; i < nloc; ++i) {
                        const Vec2 gi = pg.G * gpar[i];
                        for (int j = i; j < nloc; ++j) {
                            const double v = w * gi.dot(gpar[j]);
                            s[i * nloc + j] += v;
                            if (j != i) s[j * nloc + i] += v;
                        }
                    }
                }
            }
        },
        [&](int bl) {
            const int bx = bl % nbx;
            const int be = bl / nbx;
            const int fx = tb.sol_x.first[bx * q];
            const int fe = tb.sol_e.first[be * q];
            const auto& s = local[bl];
            for (int i = 0; i < nloc; ++i) {
                const int gi = space.flat_index(fx + i % lx, fe + i / lx);
                for (int j = 0; j < nloc; ++j) {
                    const int gj = space.flat_index(fx + j % lx, fe + j / lx);
                    S.at(gi, gj) += s[i * nloc + j];
                }
            }
            local[bl].clear();
            local[bl].shrink_to_fit();
        });

    return S;
}

SparseOperator assemble_mass(const TensorSplineSpace& space, const GeometryMap& geom,
                             const QuadratureRule& quad, Exec exec) {
    const Tables tb(space, geom, quad);
    const auto& sx = quad.xi().spans();
    const auto& se = quad.eta().spans();
    const int nbx = static_cast<int>(sx.size());
    const int q = quad.points_per_direction();
    const int lx = tb.sol_x.stride();
    const int le = tb.sol_e.stride();
    const int nloc = lx * le;

    const int num_blocks = static_cast<int>(sx.size() * se.size());
    std::vector<std::vector<double>> local(static_cast<std::size_t>(num_blocks));

    SparseOperator M(SparsityPattern::tensor_overlap(space));

    run_blocks(
        num_blocks, exec,
        [&](int bl) {
            const int bx = bl % nbx;
            const int be = bl / nbx;
            auto& m = local[bl];
            m.assign(static_cast<std::size_t>(nloc) * nloc, 0.0);
            std::vector<double> phi(static_cast<std::size_t>(nloc));
            for (int ge = 0; ge < q; ++ge) {
                const int node_e = be * q + ge;
                for (int gx = 0; gx < q; ++gx) {
                    const int node_x = bx * q + gx;
                    const auto pg = tb.geometry_at(node_x, node_e, sx[bx].nodes[gx],
                                                   se[be].nodes[ge]);
                    const double w = sx[bx].weights[gx] * se[be].weights[ge] * std::abs(pg.det);
                    for (int jb = 0; jb < le; ++jb)
                        for (int ja = 0; ja < lx; ++ja)
                            phi[jb * lx + ja] =
                                tb.sol_x.val[node_x * lx + ja] * tb.sol_e.val[node_e * le + jb];
                    for (int i = 0; i < nloc; ++i) {
                        const double wi = w * phi[i];
                        for (int j = i; j < nloc; ++j) {
                            const double v = wi * phi[j];
                            m[i * nloc + j] += v;
                            if (j != i) m[j * nloc + i] += v;
                        }
                    }
                }
            }
        },
        [&](int bl) {
            const int bx = bl % nbx;
            const int be = bl / nbx;
            const int fx = tb.sol_x.first[bx * q];
            const int fe = tb.sol_e.first[be * q];
            const auto& m = local[bl];
            for (int i = 0; i < nloc; ++i) {
                const int gi = space.flat_index(fx + i % lx, fe + i / lx);
                for (int j = 0; j < nloc; ++j) {
                    const int gj = space.flat_index(fx + j % lx, fe + j / lx);
                    M.at(gi, gj) += m[i * nloc + j];
                }
            }
            local[bl].clear();
            local[bl].shrink_to_fit();
        });

    return M;
}

std::vector<double> assemble_rhs(const TensorSplineSpace& space, const GeometryMap& geom,
                                 const QuadratureRule& quad, const SourceField& source,
                                 Exec exec) {
    const Tables tb(space, geom, quad);
    const auto& sx = quad.xi().spans();
    const auto& se = quad.eta().spans();
    const int nbx = static_cast<int>(sx.size());
    const int q = quad.points_per_direction();
    const int lx = tb.sol_x.stride();
    const int le = tb.sol_e.stride();
    const int nloc = lx * le;

    const int num_blocks = static_cast<int>(sx.size() * se.size());
    std::vector<std::vector<double>> local(static_cast<std::size_t>(num_blocks));
    std::vector<double> r(static_cast<std::size_t>(space.num_dofs()), 0.0);

    run_blocks(
        num_blocks, exec,
        [&](int bl) {
            const int bx = bl % nbx;
            const int be = bl / nbx;
            auto& v = local[bl];
            v.assign(static_cast<std::size_t>(nloc), 0.0);
            for (int ge = 0; ge < q; ++ge) {
                const int node_e = be * q + ge;
                for (int gx = 0; gx < q; ++gx) {
                    const int node_x = bx * q + gx;
                    const auto pg = tb.geometry_at(node_x, node_e, sx[bx].nodes[gx],
                                                   se[be].nodes[ge]);
                    const double w = sx[bx].weights[gx] * se[be].weights[ge] * std::abs(pg.det) *
                                     source(pg.x);
                    for (int jb = 0; jb < le; ++jb)
                        for (int ja = 0; ja < lx; ++ja)
                            v[jb * lx + ja] += w * tb.sol_x.val[node_x * lx + ja] *
                                               tb.sol_e.val[node_e * le + jb];
                }
            }
        },
        [&](int bl) {
            const int bx = bl % nbx;
            const int be = bl / nbx;
            const int fx = tb.sol_x.first[bx * q];
            const int fe = tb.sol_e.first[be * q];
            for (int i = 0; i < nloc; ++i)
                r[space.flat_index(fx + i % lx, fe + i / lx)] += local[bl][i];
            local[bl].clear();
            local[bl].shrink_to_fit();
        });

    return r;
}

namespace {

double metric_or_one(const CurveMetric& metric, double t) {
    return metric ? metric(t) : 1.0;
}

} // namespace

SparseOperator assemble_mass_1d(const KnotVector& kv, int q, const CurveMetric& metric) {
    const SpanQuadrature sq(kv, q);
    SparseOperator M(SparsityPattern::univariate_overlap(kv));
    for (const auto& span : sq.spans()) {
        for (int g = 0; g < q; ++g) {
            const double t = span.nodes[g];
            const BasisSpan bs = kv.eval_basis(t);
            const double w = span.weights[g] * metric_or_one(metric, t);
            for (int i = 0; i <= bs.degree; ++i)
                for (int j = 0; j <= bs.degree; ++j)
                    M.at(bs.first() + i, bs.first() + j) += w * bs.values[i] * bs.values[j];
        }
    }
    return M;
}

SparseOperator assemble_stiffness_1d(const KnotVector& kv, int q, double diffusion,
                                     const CurveMetric& metric) {
    const SpanQuadrature sq(kv, q);
    SparseOperator A(SparsityPattern::univariate_overlap(kv));
    for (const auto& span : sq.spans()) {
        for (int g = 0; g < q; ++g) {
            const double t = span.nodes[g];
            const BasisSpan bs = kv.eval_basis_derivs(t, 1);
            // d(phi)/ds = phi' / |x'|, ds = |x'| dt: one net division.
            const double w = span.weights[g] * diffusion / metric_or_one(metric, t);
            for (int i = 0; i <= bs.degree; ++i)
                for (int j = 0; j <= bs.degree; ++j)
                    A.at(bs.first() + i, bs.first() + j) += w * bs.derivs[0][i] * bs.derivs[0][j];
        }
    }
    return A;
}

SparseOperator assemble_convection_1d(const KnotVector& kv, int q, double velocity) {
    const SpanQuadrature sq(kv, q);
    SparseOperator K(SparsityPattern::univariate_overlap(kv));
    for (const auto& span : sq.spans()) {
        for (int g = 0; g < q; ++g) {
            const BasisSpan bs = kv.eval_basis_derivs(span.nodes[g], 1);
            const double w = span.weights[g];
            // k_ij = -v * integral of phi_j' phi_i; the metric cancels.
            for (int i = 0; i <= bs.degree; ++i)
                for (int j = 0; j <= bs.degree; ++j)
                    K.at(bs.first() + i, bs.first() + j) +=
                        -velocity * w * bs.derivs[0][j] * bs.values[i];
        }
    }
    return K;
}

std::vector<double> assemble_rhs_1d(const KnotVector& kv, int q,
                                    const std::function<double(double)>& source,
                                    const CurveMetric& metric) {
    const SpanQuadrature sq(kv, q);
    std::vector<double> r(static_cast<std::size_t>(kv.num_basis()), 0.0);
    for (const auto& span : sq.spans()) {
        for (int g = 0; g < q; ++g) {
            const double t = span.nodes[g];
            const BasisSpan bs = kv.eval_basis(t);
            const double w = span.weights[g] * metric_or_one(metric, t) * source(t);
            for (int i = 0; i <= bs.degree; ++i) r[bs.first() + i] += w * bs.values[i];
        }
    }
    return r;
}

} // namespace igafc
