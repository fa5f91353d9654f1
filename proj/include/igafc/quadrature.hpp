#pragma once

#include <vector>

#include "igafc/spline.hpp"

namespace igafc {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes/weights for q-point Gauss-Legendre, exact for polynomials of degree
/// 2q-1. Computed by Newton iteration on the Legendre recurrence.
GaussRule gauss_legendre(int q);

/// Per-span Gauss-Legendre quadrature over the nonempty spans of a knot
/// vector. Node coordinates are in the knot parameter, weights carry the span
/// length, so the weights of each span sum to its width.
class SpanQuadrature {
public:
    SpanQuadrature() = default;
    SpanQuadrature(const KnotVector& kv, int q);

    struct Span {
        int knot_index;               ///< k with [knot_k, knot_{k+1}) nonempty
        double a, b;                  ///< span interval
        std::vector<double> nodes;    ///< q points inside [a, b]
        std::vector<double> weights;
    };

    const std::vector<Span>& spans() const { return spans_; }
    int points_per_span() const { return q_; }
    double total_weight() const;

private:
    std::vector<Span> spans_;
    int q_ = 0;
};

/// Tensor-product Gauss-Legendre rule over the nonempty span rectangles of a
/// bivariate spline space.
class QuadratureRule {
public:
    QuadratureRule(const TensorSplineSpace& space, int q);

    const SpanQuadrature& xi() const { return xi_; }
    const SpanQuadrature& eta() const { return eta_; }
    int points_per_direction() const { return q_; }
    int num_blocks() const;               ///< span rectangles
    double total_weight() const;          ///< sums to the parametric area (1 for [0,1]^2)

    /// Flat list of all 2D quadrature points (xi, eta, weight).
    struct Point {
        double xi, eta, weight;
    };
    std::vector<Point> points() const;

private:
    SpanQuadrature xi_;
    SpanQuadrature eta_;
    int q_;
};

QuadratureRule make_quadrature(const TensorSplineSpace& space, int q);

} // namespace igafc
