#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace igafc::oracle {

double basis_value(const std::vector<double>& knots, int degree, int a, double xi) {
    const int n = static_cast<int>(knots.size()) - degree - 1;
    if (xi >= knots.back()) return a == n - 1 ? 1.0 : 0.0;
    if (degree == 0) return knots[a] <= xi && xi < knots[a + 1] ? 1.0 : 0.0;

    const double left_den = knots[a + degree] - knots[a];
    const double right_den = knots[a + degree + 1] - knots[a + 1];
    double value = 0.0;
    if (left_den > 0.0)
        value += (xi - knots[a]) / left_den * basis_value(knots, degree - 1, a, xi);
    if (right_den > 0.0)
        value += (knots[a + degree + 1] - xi) / right_den * basis_value(knots, degree - 1, a + 1, xi);
    return value;
}

Vec2 curve_point(const std::vector<double>& knots, int degree, const std::vector<Vec2>& points,
                 double t) {
    Vec2 x;
    for (int a = 0; a < static_cast<int>(points.size()); ++a)
        x += basis_value(knots, degree, a, t) * points[a];
    return x;
}

double curve_value(const std::vector<double>& knots, int degree,
                   const std::vector<double>& coeffs, double t) {
    double x = 0.0;
    for (int a = 0; a < static_cast<int>(coeffs.size()); ++a)
        x += basis_value(knots, degree, a, t) * coeffs[a];
    return x;
}

Mat2 fd_jacobian(const GeometryMap& geom, double xi, double eta, double step) {
    const auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    const Vec2 xp = geom.eval(clamp01(xi + step), eta);
    const Vec2 xm = geom.eval(clamp01(xi - step), eta);
    const Vec2 ep = geom.eval(xi, clamp01(eta + step));
    const Vec2 em = geom.eval(xi, clamp01(eta - step));
    const double hx = clamp01(xi + step) - clamp01(xi - step);
    const double he = clamp01(eta + step) - clamp01(eta - step);
    return {(xp.x - xm.x) / hx, (ep.x - em.x) / he, (xp.y - xm.y) / hx, (ep.y - em.y) / he};
}

} // namespace igafc::oracle
