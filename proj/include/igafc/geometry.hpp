#pragma once

#include <vector>

#include "igafc/common.hpp"
#include "igafc/spline.hpp"

namespace igafc {

class QuadratureRule;

/// Jacobian of the geometry map at one parametric point together with the
/// geometric factor G = |det J| J^-1 J^-T that pulls physical diffusion back
/// onto the parametric unit square.
struct JacobianData {
    Mat2 J;
    double det = 0.0;
    Mat2 G;
};

struct BijectivityReport {
    double min_det = 0.0;
    double max_det = 0.0;
    Vec2 argmin;          ///< parametric location of the smallest det J
    int samples = 0;
    bool passed = false;  ///< min_det > 0
};

/// Spline geometry map phi from the parametric unit square to the physical
/// domain: x(xi, eta) = sum_j c_j phi_j(xi, eta) with one 2D control point
/// per DOF of the space.
class GeometryMap {
public:
    GeometryMap(TensorSplineSpace space, std::vector<Vec2> control_points);

    const TensorSplineSpace& space() const { return space_; }
    const std::vector<Vec2>& control_points() const { return control_points_; }

    /// Physical image of a parametric point. Throws std::domain_error outside
    /// the unit square.
    Vec2 eval(double xi, double eta) const;

    /// Jacobian, determinant and geometric factor. Throws singular_map_error
    /// when |det J| falls below the degeneracy threshold (1e-12).
    JacobianData jacobian(double xi, double eta) const;

    /// det J without the degeneracy guard (used by the bijectivity sampler,
    /// where a nonpositive value is a report outcome, not an exception).
    double jacobian_det(double xi, double eta) const;

    /// Sample det J on a uniform (samples x samples) parametric grid, plus
    /// all points of `quad` when given, and report the extremes.
    BijectivityReport validate_bijectivity(int samples_per_direction,
                                           const QuadratureRule* quad = nullptr) const;

    /// Geometry refined to the given basis counts by knot insertion; shape
    /// is preserved exactly.
    GeometryMap refined(int target_xi, int target_eta) const;

private:
    TensorSplineSpace space_;
    std::vector<Vec2> control_points_;
};

/// Which side of the parametric unit square a boundary curve runs along.
enum class Edge { bottom, right, top, left };

constexpr const char* edge_name(Edge e) {
    switch (e) {
        case Edge::bottom: return "bottom";
        case Edge::right: return "right";
        case Edge::top: return "top";
        case Edge::left: return "left";
    }
    return "?";
}

/// Restriction of a geometry map to one edge of the unit square: a univariate
/// B-spline curve in the edge's running parameter (xi for bottom/top, eta for
/// left/right).
struct BoundaryCurve {
    Edge edge;
    KnotVector kv;
    std::vector<Vec2> control_points;
    std::vector<int> dofs;   ///< flat surface DOF of each curve coefficient

    Vec2 eval(double t) const;
    /// Arc-length metric |dx/dt| at parameter t.
    double metric(double t) const;
};

BoundaryCurve boundary_curve(const GeometryMap& geom, Edge edge);

/// Control net that reproduces the identity map of the unit square (tensor
/// Greville points of the space).
std::vector<Vec2> greville_net(const TensorSplineSpace& space);

} // namespace igafc
