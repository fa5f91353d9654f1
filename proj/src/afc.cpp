#include "igafc/afc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "igafc/solver.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace igafc {

SparseOperator build_discrete_diffusion(const SparseOperator& K) {
    SparseOperator D(K.pattern_ptr());
    const int n = K.size();
    for (int i = 0; i < n; ++i) {
        for (int j : K.pattern().row(i)) {
            if (j <= i) continue;
            const double d = std::max({0.0, -K(i, j), -K(j, i)});
            if (d == 0.0) continue;
            D.at(i, j) = d;
            D.at(j, i) = d;
        }
    }
    for (int i = 0; i < n; ++i) {
        double off = 0.0;
        for (int j : D.pattern().row(i))
            if (j != i) off += D(i, j);
        D.at(i, i) = -off;
    }
    return D;
}

SparseOperator low_order_operator(const SparseOperator& K, const SparseOperator& D) {
    return operator_sum(K, D);
}

EdgeSet EdgeSet::build(const SparseOperator& L, const SparseOperator& D) {
    if (L.size() != D.size()) throw std::invalid_argument("edge set: operator size mismatch");

    EdgeSet set;
    set.num_dofs_ = L.size();
    for (int a = 0; a < L.size(); ++a) {
        for (int b : D.pattern().row(a)) {
            if (b <= a) continue;
            const double d = D(a, b);
            if (d <= 0.0) continue;
            // Upwind endpoint i carries the smaller low-order coefficient
            // toward its partner (l_ij <= l_ji); equal entries put the
            // smaller index upwind. The downwind node receives the dominant
            // low-order transport, and the upwind node's bounds limit the
            // edge.
            const bool a_upwind = L(a, b) <= L(b, a);
            set.edges_.push_back(a_upwind ? Edge{a, b, d} : Edge{b, a, d});
        }
    }

    std::vector<int> count(static_cast<std::size_t>(set.num_dofs_) + 1, 0);
    for (const Edge& e : set.edges_) {
        ++count[e.upwind + 1];
        ++count[e.downwind + 1];
    }
    for (int i = 0; i < set.num_dofs_; ++i) count[i + 1] += count[i];
    set.offsets_ = count;
    set.incidence_.resize(set.edges_.size() * 2);
    std::vector<int> cursor(set.offsets_.begin(), set.offsets_.end() - 1);
    for (int e = 0; e < static_cast<int>(set.edges_.size()); ++e) {
        set.incidence_[cursor[set.edges_[e].upwind]++] = {e, true};
        set.incidence_[cursor[set.edges_[e].downwind]++] = {e, false};
    }
    return set;
}

void LimiterWorkspace::resize(int num_dofs, int num_edges) {
    const auto n = static_cast<std::size_t>(num_dofs);
    p_plus.assign(n, 0.0);
    p_minus.assign(n, 0.0);
    q_plus.assign(n, 0.0);
    q_minus.assign(n, 0.0);
    r_plus.assign(n, 0.0);
    r_minus.assign(n, 0.0);
    flux.assign(static_cast<std::size_t>(num_edges), 0.0);
}

LimiterResult limited_antidiffusion(const EdgeSet& edges, std::span<const double> u,
                                    LimiterWorkspace& work, Exec exec,
                                    std::optional<double> force_alpha) {
    const int n = edges.num_dofs();
    const int ne = static_cast<int>(edges.edges().size());
    work.resize(n, ne);

    LimiterResult out;
    out.correction.assign(static_cast<std::size_t>(n), 0.0);
    out.alpha.assign(static_cast<std::size_t>(ne), force_alpha.value_or(1.0));

    const bool parallel = exec == Exec::parallel;
#ifndef _OPENMP
    (void)parallel;
#endif

    // Raw fluxes, one slot per edge.
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (int e = 0; e < ne; ++e) {
        const auto& ed = edges.edges()[e];
        work.flux[e] = ed.d * (u[ed.upwind] - u[ed.downwind]);
    }

    if (!force_alpha) {
        // Accumulate P/Q under row ownership: every DOF sums its own incident
        // edges in a fixed order, so the result is thread-count independent.
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
        for (int i = 0; i < n; ++i) {
            double pp = 0.0, pm = 0.0, qp = 0.0, qm = 0.0;
            for (const auto& inc : edges.incident(i)) {
                const double f = work.flux[inc.edge];
                if (inc.is_upwind) {
                    pp += std::max(0.0, f);
                    pm += std::min(0.0, f);
                    qp += std::max(0.0, -f);
                    qm += std::min(0.0, -f);
                } else {
                    qp += std::max(0.0, f);
                    qm += std::min(0.0, f);
                }
            }
            work.p_plus[i] = pp;
            work.p_minus[i] = pm;
            work.q_plus[i] = qp;
            work.q_minus[i] = qm;
            work.r_plus[i] = pp > 0.0 ? std::min(1.0, qp / pp) : 1.0;
            work.r_minus[i] = pm < 0.0 ? std::min(1.0, qm / pm) : 1.0;
        }

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
        for (int e = 0; e < ne; ++e) {
            const double f = work.flux[e];
            const int up = edges.edges()[e].upwind;
            out.alpha[e] = f > 0.0 ? work.r_plus[up] : (f < 0.0 ? work.r_minus[up] : 1.0);
        }
    }

    // Skew-symmetric distribution of the limited fluxes.
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
    for (int i = 0; i < n; ++i) {
        double sum = 0.0;
        for (const auto& inc : edges.incident(i)) {
            const double lf = out.alpha[inc.edge] * work.flux[inc.edge];
            sum += inc.is_upwind ? lf : -lf;
        }
        out.correction[i] = sum;
    }
    return out;
}

LimiterResult limited_antidiffusion(const SparseOperator& L, const SparseOperator& D,
                                    std::span<const double> u,
                                    std::optional<double> force_alpha) {
    const EdgeSet edges = EdgeSet::build(L, D);
    LimiterWorkspace work;
    return limited_antidiffusion(edges, u, work, Exec::serial, force_alpha);
}

namespace {

struct EdgeProjection {
    std::vector<double> values;
    std::vector<double> lumped;   ///< direct integrals of the basis functions
};

EdgeProjection project_edge_impl(const BoundaryCurve& curve, const EdgeProfile& beta, int q) {
    const KnotVector& kv = curve.kv;
    const int n = kv.num_basis();
    const CurveMetric metric = [&curve](double t) { return curve.metric(t); };

    // Lumped projection: load vector and lumped mass share every quadrature
    // factor, so a constant profile is reproduced bitwise.
    const std::vector<double> load = assemble_rhs_1d(kv, q, beta, metric);
    const std::vector<double> lumped =
        assemble_rhs_1d(kv, q, [](double) { return 1.0; }, metric);

    double beta_min = std::numeric_limits<double>::infinity();
    double beta_max = -beta_min;
    const SpanQuadrature sq(kv, q);
    for (const auto& span : sq.spans())
        for (double t : span.nodes) {
            const double v = beta(t);
            beta_min = std::min(beta_min, v);
            beta_max = std::max(beta_max, v);
        }

    EdgeProjection out;
    out.lumped = lumped;
    out.values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        out.values[i] = std::clamp(load[i] / lumped[i], beta_min, beta_max);

    // Flux-corrected recovery of the consistent projection. Raw fluxes stem
    // from (M_C - M_L) applied to the consistent solution; the Zalesak-type
    // limiter keeps every coefficient inside the local bounds of the lumped
    // solution.
    const SparseOperator mass = assemble_mass_1d(kv, q, metric);
    const std::vector<double> consistent = solve_linear(mass, load);

    std::vector<double> local_min(static_cast<std::size_t>(n));
    std::vector<double> local_max(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double lo = out.values[i], hi = out.values[i];
        for (int j : mass.pattern().row(i)) {
            lo = std::min(lo, out.values[j]);
            hi = std::max(hi, out.values[j]);
        }
        local_min[i] = lo;
        local_max[i] = hi;
    }

    struct Flux {
        int i, j;
        double f;
    };
    std::vector<Flux> fluxes;
    for (int i = 0; i < n; ++i)
        for (int j : mass.pattern().row(i)) {
            if (j <= i) continue;
            const double f = mass(i, j) * (consistent[i] - consistent[j]);
            if (f != 0.0) fluxes.push_back({i, j, f});
        }

    std::vector<double> p_plus(n, 0.0), p_minus(n, 0.0);
    for (const Flux& fl : fluxes) {
        p_plus[fl.i] += std::max(0.0, fl.f);
        p_minus[fl.i] += std::min(0.0, fl.f);
        p_plus[fl.j] += std::max(0.0, -fl.f);
        p_minus[fl.j] += std::min(0.0, -fl.f);
    }
    std::vector<double> r_plus(n), r_minus(n);
    for (int i = 0; i < n; ++i) {
        const double q_plus = lumped[i] * (local_max[i] - out.values[i]);
        const double q_minus = lumped[i] * (local_min[i] - out.values[i]);
        r_plus[i] = p_plus[i] > 0.0 ? std::min(1.0, q_plus / p_plus[i]) : 1.0;
        r_minus[i] = p_minus[i] < 0.0 ? std::min(1.0, q_minus / p_minus[i]) : 1.0;
    }

    std::vector<double> correction(static_cast<std::size_t>(n), 0.0);
    for (const Flux& fl : fluxes) {
        const double alpha =
            fl.f > 0.0 ? std::min(r_plus[fl.i], r_minus[fl.j]) : std::min(r_minus[fl.i], r_plus[fl.j]);
        correction[fl.i] += alpha * fl.f;
        correction[fl.j] -= alpha * fl.f;
    }
    for (int i = 0; i < n; ++i)
        out.values[i] =
            std::clamp(out.values[i] + correction[i] / lumped[i], local_min[i], local_max[i]);

    return out;
}

} // namespace

std::vector<double> project_edge_values(const BoundaryCurve& curve, const EdgeProfile& beta,
                                        int q) {
    return project_edge_impl(curve, beta, q).values;
}

BoundaryValues project_dirichlet(const GeometryMap& geom,
                                 const std::function<double(double, double)>& beta, int q) {
    const TensorSplineSpace& space = geom.space();

    struct Accum {
        double weighted = 0.0;
        double weight = 0.0;
        double single_value = 0.0;
        int hits = 0;
    };
    std::vector<Accum> acc(static_cast<std::size_t>(space.num_dofs()));

    const Edge all_edges[] = {Edge::bottom, Edge::right, Edge::top, Edge::left};
    for (Edge e : all_edges) {
        const BoundaryCurve curve = boundary_curve(geom, e);
        EdgeProfile profile;
        switch (e) {
            case Edge::bottom: profile = [&beta](double t) { return beta(t, 0.0); }; break;
            case Edge::top: profile = [&beta](double t) { return beta(t, 1.0); }; break;
            case Edge::left: profile = [&beta](double t) { return beta(0.0, t); }; break;
            case Edge::right: profile = [&beta](double t) { return beta(1.0, t); }; break;
        }
        const EdgeProjection proj = project_edge_impl(curve, profile, q);
        for (std::size_t k = 0; k < curve.dofs.size(); ++k) {
            Accum& a = acc[curve.dofs[k]];
            a.weighted += proj.lumped[k] * proj.values[k];
            a.weight += proj.lumped[k];
            a.single_value = proj.values[k];
            ++a.hits;
        }
    }

    BoundaryValues bv;
    bv.dofs = space.boundary_dofs();
    bv.values.resize(bv.dofs.size());
    for (std::size_t k = 0; k < bv.dofs.size(); ++k) {
        const Accum& a = acc[bv.dofs[k]];
        // Corner DOFs belong to two curves; merge with lumped-mass weights.
        bv.values[k] = a.hits == 1 ? a.single_value : a.weighted / a.weight;
    }
    return bv;
}

ConstrainedSystem apply_dirichlet(const TensorSplineSpace& space, const SparseOperator& S,
                                  const SparseOperator& L, const std::vector<double>& r,
                                  const BoundaryValues& bc) {
    ConstrainedSystem sys{operator_difference(S, L), r, bc.dofs};
    constrain_system(space, sys.matrix, sys.rhs, bc);
    return sys;
}

void constrain_system(const TensorSplineSpace& space, SparseOperator& A, std::vector<double>& rhs,
                      const BoundaryValues& bc) {
    if (bc.dofs.size() != bc.values.size())
        throw std::invalid_argument("apply_dirichlet: index/value size mismatch");
    for (int dof : bc.dofs)
        if (dof < 0 || dof >= space.num_dofs() || !space.is_boundary(dof))
            throw std::invalid_argument("apply_dirichlet: value prescribed for a non-boundary DOF");
    if (static_cast<int>(bc.dofs.size()) !=
        static_cast<int>(space.boundary_dofs().size()))
        throw std::invalid_argument("apply_dirichlet: boundary ring not fully covered");

    for (std::size_t k = 0; k < bc.dofs.size(); ++k) {
        const int i = bc.dofs[k];
        for (double& v : A.row_values(i)) v = 0.0;
        A.at(i, i) = 1.0;
        rhs[i] = bc.values[k];
    }
}

} // namespace igafc
