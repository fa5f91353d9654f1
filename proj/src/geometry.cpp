#include "igafc/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "igafc/quadrature.hpp"

namespace igafc {

namespace {

constexpr double kDegeneracyThreshold = 1e-12;

void check_unit_square(double xi, double eta) {
    if (!(xi >= 0.0 && xi <= 1.0 && eta >= 0.0 && eta <= 1.0))
        throw std::domain_error("geometry map: parameter outside the unit square");
}

} // namespace

GeometryMap::GeometryMap(TensorSplineSpace space, std::vector<Vec2> control_points)
    : space_(std::move(space)), control_points_(std::move(control_points)) {
    if (control_points_.size() != static_cast<std::size_t>(space_.num_dofs()))
        throw std::invalid_argument("geometry map: control point count does not match the space");
}

Vec2 GeometryMap::eval(double xi, double eta) const {
    check_unit_square(xi, eta);
    const BasisSpan bx = space_.xi().eval_basis(xi);
    const BasisSpan be = space_.eta().eval_basis(eta);
    Vec2 x;
    for (int jb = 0; jb <= be.degree; ++jb) {
        Vec2 partial;
        const int b = be.first() + jb;
        for (int ja = 0; ja <= bx.degree; ++ja)
            partial += bx.values[ja] * control_points_[space_.flat_index(bx.first() + ja, b)];
        x += be.values[jb] * partial;
    }
    return x;
}

double GeometryMap::jacobian_det(double xi, double eta) const {
    check_unit_square(xi, eta);
    const BasisSpan bx = space_.xi().eval_basis_derivs(xi, 1);
    const BasisSpan be = space_.eta().eval_basis_derivs(eta, 1);
    Vec2 d_xi, d_eta;
    for (int jb = 0; jb <= be.degree; ++jb) {
        const int b = be.first() + jb;
        for (int ja = 0; ja <= bx.degree; ++ja) {
            const Vec2 c = control_points_[space_.flat_index(bx.first() + ja, b)];
            d_xi += (bx.derivs[0][ja] * be.values[jb]) * c;
            d_eta += (bx.values[ja] * be.derivs[0][jb]) * c;
        }
    }
    return d_xi.x * d_eta.y - d_xi.y * d_eta.x;
}

JacobianData GeometryMap::jacobian(double xi, double eta) const {
    check_unit_square(xi, eta);
    const BasisSpan bx = space_.xi().eval_basis_derivs(xi, 1);
    const BasisSpan be = space_.eta().eval_basis_derivs(eta, 1);
    Vec2 d_xi, d_eta;
    for (int jb = 0; jb <= be.degree; ++jb) {
        const int b = be.first() + jb;
        for (int ja = 0; ja <= bx.degree; ++ja) {
            const Vec2 c = control_points_[space_.flat_index(bx.first() + ja, b)];
            d_xi += (bx.derivs[0][ja] * be.values[jb]) * c;
            d_eta += (bx.values[ja] * be.derivs[0][jb]) * c;
        }
    }

    JacobianData out;
    out.J = Mat2{d_xi.x, d_eta.x, d_xi.y, d_eta.y};   // columns are dx/dxi, dx/deta
    out.det = out.J.det();
    if (std::abs(out.det) < kDegeneracyThreshold)
        throw singular_map_error(xi, eta, out.det);

    // G = |det J| J^-1 J^-T = adj(J) adj(J)^T / |det J|.
    const Mat2 adj = out.J.adjugate();
    const Mat2 gg = adj * adj.transpose();
    const double inv_abs_det = 1.0 / std::abs(out.det);
    out.G = Mat2{gg.a11 * inv_abs_det, gg.a12 * inv_abs_det,
                 gg.a21 * inv_abs_det, gg.a22 * inv_abs_det};
    return out;
}

BijectivityReport GeometryMap::validate_bijectivity(int samples_per_direction,
                                                    const QuadratureRule* quad) const {
    if (samples_per_direction < 2)
        throw std::invalid_argument("validate_bijectivity: need at least 2 samples per direction");

    BijectivityReport report;
    report.min_det = std::numeric_limits<double>::infinity();
    report.max_det = -std::numeric_limits<double>::infinity();

    auto visit = [&](double xi, double eta) {
        const double det = jacobian_det(xi, eta);
        if (det < report.min_det) {
            report.min_det = det;
            report.argmin = {xi, eta};
        }
        report.max_det = std::max(report.max_det, det);
        ++report.samples;
    };

    const int n = samples_per_direction;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i)
            visit(static_cast<double>(i) / (n - 1), static_cast<double>(j) / (n - 1));
    if (quad)
        for (const auto& pt : quad->points()) visit(pt.xi, pt.eta);

    report.passed = report.min_det > 0.0;
    return report;
}

GeometryMap GeometryMap::refined(int target_xi, int target_eta) const {
    RefinedSpace r = refine_space(space_, control_points_, target_xi, target_eta);
    return GeometryMap(std::move(r.space), std::move(r.net));
}

Vec2 BoundaryCurve::eval(double t) const {
    const BasisSpan bs = kv.eval_basis(t);
    Vec2 x;
    for (int j = 0; j <= bs.degree; ++j) x += bs.values[j] * control_points[bs.first() + j];
    return x;
}

double BoundaryCurve::metric(double t) const {
    const BasisSpan bs = kv.eval_basis_derivs(t, 1);
    Vec2 d;
    for (int j = 0; j <= bs.degree; ++j) d += bs.derivs[0][j] * control_points[bs.first() + j];
    return d.norm();
}

BoundaryCurve boundary_curve(const GeometryMap& geom, Edge edge) {
    const TensorSplineSpace& space = geom.space();
    const int nx = space.num_xi();
    const int ny = space.num_eta();

    BoundaryCurve curve{edge,
                        (edge == Edge::bottom || edge == Edge::top) ? space.xi() : space.eta(),
                        {},
                        {}};
    auto take = [&](int a, int b) {
        const int j = space.flat_index(a, b);
        curve.dofs.push_back(j);
        curve.control_points.push_back(geom.control_points()[j]);
    };
    switch (edge) {
        case Edge::bottom:
            for (int a = 0; a < nx; ++a) take(a, 0);
            break;
        case Edge::top:
            for (int a = 0; a < nx; ++a) take(a, ny - 1);
            break;
        case Edge::left:
            for (int b = 0; b < ny; ++b) take(0, b);
            break;
        case Edge::right:
            for (int b = 0; b < ny; ++b) take(nx - 1, b);
            break;
    }
    return curve;
}

std::vector<Vec2> greville_net(const TensorSplineSpace& space) {
    std::vector<Vec2> net(static_cast<std::size_t>(space.num_dofs()));
    for (int j = 0; j < space.num_dofs(); ++j) net[j] = space.greville(j);
    return net;
}

} // namespace igafc
