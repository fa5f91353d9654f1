#include "igafc/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace igafc {

GaussRule gauss_legendre(int q) {
    if (q < 1) throw std::invalid_argument("gauss_legendre: need at least one point");

    GaussRule rule;
    rule.nodes.resize(q);
    rule.weights.resize(q);

    // Newton iteration on P_q from the Chebyshev-angle initial guess; the
    // recurrence also yields P'_q for the weight 2 / ((1-x^2) P'_q^2).
    for (int i = 0; i < (q + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= q; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = q * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[q - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[q - 1 - i] = w;
    }
    if (q % 2 == 1) rule.nodes[q / 2] = 0.0;
    return rule;
}

SpanQuadrature::SpanQuadrature(const KnotVector& kv, int q) : q_(q) {
    const GaussRule ref = gauss_legendre(q);
    const auto& knots = kv.knots();
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        if (knots[i] == knots[i + 1]) continue;
        Span span;
        span.knot_index = static_cast<int>(i);
        span.a = knots[i];
        span.b = knots[i + 1];
        const double mid = 0.5 * (span.a + span.b);
        const double half = 0.5 * (span.b - span.a);
        span.nodes.resize(q);
        span.weights.resize(q);
        for (int g = 0; g < q; ++g) {
            span.nodes[g] = mid + half * ref.nodes[g];
            span.weights[g] = half * ref.weights[g];
        }
        spans_.push_back(std::move(span));
    }
}

double SpanQuadrature::total_weight() const {
    double sum = 0.0;
    for (const auto& s : spans_)
        for (double w : s.weights) sum += w;
    return sum;
}

QuadratureRule::QuadratureRule(const TensorSplineSpace& space, int q)
    : xi_(space.xi(), q), eta_(space.eta(), q), q_(q) {}

int QuadratureRule::num_blocks() const {
    return static_cast<int>(xi_.spans().size() * eta_.spans().size());
}

double QuadratureRule::total_weight() const {
    return xi_.total_weight() * eta_.total_weight();
}

std::vector<QuadratureRule::Point> QuadratureRule::points() const {
    std::vector<Point> pts;
    pts.reserve(static_cast<std::size_t>(num_blocks()) * q_ * q_);
    for (const auto& se : eta_.spans())
        for (const auto& sx : xi_.spans())
            for (int ge = 0; ge < q_; ++ge)
                for (int gx = 0; gx < q_; ++gx)
                    pts.push_back({sx.nodes[gx], se.nodes[ge], sx.weights[gx] * se.weights[ge]});
    return pts;
}

QuadratureRule make_quadrature(const TensorSplineSpace& space, int q) {
    return QuadratureRule(space, q);
}

} // namespace igafc
