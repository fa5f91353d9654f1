#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "igafc/assembly.hpp"
#include "igafc/geometry.hpp"
#include "igafc/sparse.hpp"

namespace igafc {

/// Algebraic flux correction of TVD type.
///
/// The Galerkin convection operator K is stabilized in two steps: a discrete
/// diffusion operator D eliminates its negative off-diagonal entries, giving
/// the low-order operator L = K + D, and a limited anti-diffusive correction
/// puts the excess diffusion back where this cannot create new extrema.

/// Discrete diffusion operator: d_ij = d_ji = max{0, -k_ij, -k_ji} off the
/// diagonal, d_ii = -sum of the row. Symmetric with zero row and column sums;
/// K + D has no negative off-diagonal entries.
SparseOperator build_discrete_diffusion(const SparseOperator& K);

/// L = K + D (entrywise).
SparseOperator low_order_operator(const SparseOperator& K, const SparseOperator& D);

/// Unordered DOF pairs with support overlap and d_ij > 0, oriented so that
/// the stored `upwind` endpoint i satisfies l_ji <= l_ij (ties broken by the
/// smaller index upwind). Per-DOF incidence lists make the limiter sweeps
/// race-free under row ownership.
class EdgeSet {
public:
    struct Edge {
        int upwind;
        int downwind;
        double d;       ///< d_ij > 0
    };

    static EdgeSet build(const SparseOperator& L, const SparseOperator& D);

    const std::vector<Edge>& edges() const { return edges_; }
    int num_dofs() const { return num_dofs_; }

    struct Incidence {
        int edge;
        bool is_upwind;
    };
    std::span<const Incidence> incident(int dof) const {
        return {incidence_.data() + offsets_[dof], incidence_.data() + offsets_[dof + 1]};
    }

private:
    std::vector<Edge> edges_;
    std::vector<int> offsets_;
    std::vector<Incidence> incidence_;
    int num_dofs_ = 0;
};

/// Scratch arrays of the TVD limiter; reusable between sweeps of one solve,
/// not shared between concurrent solves.
struct LimiterWorkspace {
    std::vector<double> p_plus, p_minus;
    std::vector<double> q_plus, q_minus;
    std::vector<double> r_plus, r_minus;
    std::vector<double> flux;    ///< raw edge flux d_ij (u_i - u_j), i upwind

    void resize(int num_dofs, int num_edges);
};

struct LimiterResult {
    std::vector<double> correction;   ///< f_bar per DOF
    std::vector<double> alpha;        ///< per edge, in [0, 1]
};

/// Limited anti-diffusion f_bar(u). Per edge the raw flux
/// f_ij = d_ij (u_i - u_j) (i the upwind endpoint) is scaled by the TVD
/// correction factor alpha_ij and distributed skew-symmetrically: +alpha f to
/// i, -alpha f to j. alpha == 1 everywhere restores the Galerkin scheme,
/// alpha == 0 the linear low-order scheme. `force_alpha` pins every factor to
/// the given value (diagnostics and the acceptance anchors).
LimiterResult limited_antidiffusion(const EdgeSet& edges, std::span<const double> u,
                                    LimiterWorkspace& work, Exec exec = Exec::serial,
                                    std::optional<double> force_alpha = std::nullopt);

/// Convenience overload matching the operator-level signature.
LimiterResult limited_antidiffusion(const SparseOperator& L, const SparseOperator& D,
                                    std::span<const double> u,
                                    std::optional<double> force_alpha = std::nullopt);

/// Parametric boundary profile beta restricted to one edge of the unit
/// square, as a function of the edge's running parameter.
using EdgeProfile = std::function<double(double)>;

/// Constrained projection of boundary data onto the trace space of one edge:
/// lumped L2 projection (guaranteed within [min beta, max beta]) plus a
/// Zalesak-limited correction toward the consistent L2 projection that keeps
/// every coefficient within the local bounds of the lumped solution.
std::vector<double> project_edge_values(const BoundaryCurve& curve, const EdgeProfile& beta,
                                        int q);

struct BoundaryValues {
    std::vector<int> dofs;       ///< sorted flat indices of the boundary ring
    std::vector<double> values;  ///< one value per entry of `dofs`
};

/// Project a parametric profile beta(xi, eta) on all four edges and merge the
/// corner DOFs by lumped-mass weighted averaging of the adjacent edge
/// projections.
BoundaryValues project_dirichlet(const GeometryMap& geom,
                                 const std::function<double(double, double)>& beta, int q);

struct ConstrainedSystem {
    SparseOperator matrix;        ///< S - L with boundary rows replaced by identity
    std::vector<double> rhs;      ///< r with boundary entries set to the prescribed values
    std::vector<int> boundary;    ///< constrained DOFs, sorted
};

/// Replace the boundary rows of S - L by identity rows and pin the
/// right-hand side to the prescribed values. Interior rows keep their
/// coupling to boundary columns. Throws std::invalid_argument when a value
/// is supplied for a DOF that is not on the boundary ring of the space.
ConstrainedSystem apply_dirichlet(const TensorSplineSpace& space, const SparseOperator& S,
                                  const SparseOperator& L, const std::vector<double>& r,
                                  const BoundaryValues& bc);

/// Same row replacement for an arbitrary system matrix (used for the direct
/// Galerkin and low-order reference solves).
void constrain_system(const TensorSplineSpace& space, SparseOperator& A, std::vector<double>& rhs,
                      const BoundaryValues& bc);

} // namespace igafc
