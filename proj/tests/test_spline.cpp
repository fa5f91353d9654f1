#include <doctest.h>

#include <cmath>
#include <random>

#include "igafc/spline.hpp"
#include "oracles.hpp"

using namespace igafc;

namespace {

const std::vector<double> benchmark_knots = {0, 0, 0, 0.5, 1, 1, 1};

KnotVector benchmark_kv() { return KnotVector(benchmark_knots, 2); }

} // namespace

TEST_CASE("knot vector invariants are enforced") {
    CHECK_NOTHROW(benchmark_kv());
    CHECK_NOTHROW(KnotVector({0, 0, 1, 1}, 1));
    CHECK_THROWS_AS(KnotVector({0, 0, 0.6, 0.4, 1, 1}, 1), std::invalid_argument); // decreasing
    CHECK_THROWS_AS(KnotVector({0, 0, 0.5, 1, 1, 1}, 2), std::invalid_argument);   // not clamped
    CHECK_THROWS_AS(KnotVector({0, 0, 1, 1}, 2), std::invalid_argument);           // too few basis
    // interior multiplicity above degree+1
    CHECK_THROWS_AS(KnotVector({0, 0, 0.5, 0.5, 0.5, 1, 1}, 1), std::invalid_argument);

    const KnotVector kv = benchmark_kv();
    CHECK(kv.num_basis() == 4);
    CHECK(kv.num_spans() == 2);
    CHECK(kv.multiplicity(0.5) == 1);
    CHECK(kv.multiplicity(0.25) == 0);
}

TEST_CASE("find_span follows the half-open convention with a closed right end") {
    const KnotVector kv = benchmark_kv();
    CHECK(kv.find_span(0.25) == 2);
    CHECK(kv.find_span(1.0) == 3);
    CHECK(kv.find_span(0.5) == 3);
    CHECK(kv.find_span(0.0) == 2);
    CHECK_THROWS_AS(kv.find_span(-0.01), std::domain_error);
    CHECK_THROWS_AS(kv.find_span(1.01), std::domain_error);

    // Repeated interior knot: the empty interval is skipped.
    const KnotVector kv2({0, 0, 0, 0.5, 0.5, 1, 1, 1}, 2);
    CHECK(kv2.find_span(0.5) == 4);
}

TEST_CASE("eval_basis matches the per-span polynomials of the benchmark knot vector") {
    const KnotVector kv = benchmark_kv();

    // On [0, 0.5): N0 = (1-2x)^2, N1 = 2x(2-3x), N2 = 2x^2.
    const BasisSpan bs = kv.eval_basis(0.25);
    CHECK(bs.first() == 0);
    CHECK(bs.values[0] == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(bs.values[1] == doctest::Approx(0.625).epsilon(1e-14));
    CHECK(bs.values[2] == doctest::Approx(0.125).epsilon(1e-14));

    const BasisSpan at0 = kv.eval_basis(0.0);
    CHECK(at0.values[0] == 1.0);
    CHECK(at0.values[1] == 0.0);
    CHECK(at0.values[2] == 0.0);
    const BasisSpan at1 = kv.eval_basis(1.0);
    CHECK(at1.values[2] == 1.0);
}

TEST_CASE("eval_basis agrees with the raw recursion oracle") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    const std::vector<std::pair<std::vector<double>, int>> spaces = {
        {benchmark_knots, 2},
        {{0, 0, 0, 0.2, 0.5, 0.5, 0.7, 1, 1, 1}, 2},
        {{0, 0, 0, 0, 0.3, 0.6, 1, 1, 1, 1}, 3},
    };
    for (const auto& [knots, p] : spaces) {
        const KnotVector kv(knots, p);
        for (int s = 0; s < 200; ++s) {
            const double xi = dist(rng);
            const BasisSpan bs = kv.eval_basis(xi);
            for (int a = 0; a < kv.num_basis(); ++a) {
                const double expected = oracle::basis_value(knots, p, a, xi);
                const int local = a - bs.first();
                const double got = (local >= 0 && local <= p) ? bs.values[local] : 0.0;
                CHECK(got == doctest::Approx(expected).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("partition of unity, nonnegativity and local support") {
    const KnotVector kvs[] = {benchmark_kv(), KnotVector::uniform(18, 2),
                              KnotVector({0, 0, 0, 0.5, 0.5, 1, 1, 1}, 2)};
    for (const KnotVector& kv : kvs) {
        constexpr int samples = 10000;
        double worst = 0.0;
        for (int s = 0; s <= samples; ++s) {
            const double xi = static_cast<double>(s) / samples;
            const BasisSpan bs = kv.eval_basis(xi);
            double sum = 0.0;
            for (double v : bs.values) {
                CHECK(v >= 0.0);
                sum += v;
            }
            worst = std::max(worst, std::abs(sum - 1.0));
        }
        CHECK(worst < 1e-13);
    }

    // Values vanish outside (knot_a, knot_{a+p+1}).
    const KnotVector kv = KnotVector::uniform(8, 2);
    for (int a = 0; a < kv.num_basis(); ++a) {
        for (int s = 0; s <= 100; ++s) {
            const double xi = s / 100.0;
            if (xi > kv.knot(a) && xi < kv.knot(a + 3)) continue;
            const BasisSpan bs = kv.eval_basis(xi);
            const int local = a - bs.first();
            const double v = (local >= 0 && local <= 2) ? bs.values[local] : 0.0;
            if (xi != kv.knot(a) && xi != kv.knot(a + 3)) CHECK(v == 0.0);
        }
    }
}

TEST_CASE("derivatives: frozen endpoint values, hat slopes and sum rules") {
    const KnotVector kv = benchmark_kv();

    // d/dx of (1-2x)^2, 2x(2-3x), 2x^2 at x = 0.
    const BasisSpan d0 = kv.eval_basis_derivs(0.0, 1);
    CHECK(d0.derivs[0][0] == doctest::Approx(-4.0).epsilon(1e-14));
    CHECK(d0.derivs[0][1] == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(d0.derivs[0][2] == doctest::Approx(0.0).epsilon(1e-14));

    // Second derivatives of the same polynomials at x = 0.25: (8, -12, 4).
    const BasisSpan d2 = kv.eval_basis_derivs(0.25, 2);
    CHECK(d2.derivs[1][0] == doctest::Approx(8.0).epsilon(1e-13));
    CHECK(d2.derivs[1][1] == doctest::Approx(-12.0).epsilon(1e-13));
    CHECK(d2.derivs[1][2] == doctest::Approx(4.0).epsilon(1e-13));

    const KnotVector hats({0, 0, 1, 1}, 1);
    const BasisSpan hd = hats.eval_basis_derivs(0.5, 1);
    CHECK(hd.derivs[0][0] == doctest::Approx(-1.0));
    CHECK(hd.derivs[0][1] == doctest::Approx(1.0));

    // Orders above the degree are exact zeros; values still present.
    const BasisSpan high = kv.eval_basis_derivs(0.3, 4);
    REQUIRE(high.derivs.size() == 4);
    for (double v : high.derivs[2]) CHECK(v == 0.0);
    for (double v : high.derivs[3]) CHECK(v == 0.0);

    for (int s = 0; s <= 500; ++s) {
        const double xi = s / 500.0;
        const BasisSpan bs = kv.eval_basis_derivs(xi, 1);
        double dsum = 0.0;
        for (double v : bs.derivs[0]) dsum += v;
        CHECK(std::abs(dsum) < 1e-12);
    }
}

TEST_CASE("single knot insertion: blending band and curve invariance") {
    const KnotVector kv = benchmark_kv();
    const std::vector<double> coeffs = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};

    auto [kv2, c2] = insert_knot(kv, coeffs, 0.25);
    CHECK(kv2.num_basis() == 5);
    CHECK(kv2.multiplicity(0.25) == 1);

    // Hand-computed convex combinations: alpha = 0.5 and 0.25 on the band.
    REQUIRE(c2.size() == 5);
    CHECK(c2[0] == doctest::Approx(0.0));
    CHECK(c2[1] == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(c2[2] == doctest::Approx(5.0 / 12.0).epsilon(1e-14));
    CHECK(c2[3] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(c2[4] == doctest::Approx(1.0));

    for (int s = 0; s <= 100; ++s) {
        const double t = s / 100.0;
        const double before = oracle::curve_value(kv.knots(), 2, coeffs, t);
        const double after = oracle::curve_value(kv2.knots(), 2, c2, t);
        CHECK(std::abs(before - after) < 1e-14);
    }

    CHECK_THROWS_AS(insert_knot(kv, coeffs, 0.0), std::domain_error);
    CHECK_THROWS_AS(insert_knot(kv, coeffs, 1.0), std::domain_error);
    CHECK_THROWS_AS(insert_knot(kv, coeffs, -2.0), std::domain_error);

    // Multiplicity may reach the degree, not exceed it.
    auto [kv3, c3] = insert_knot(kv2, c2, 0.25);
    CHECK(kv3.multiplicity(0.25) == 2);
    CHECK_THROWS_AS(insert_knot(kv3, c3, 0.25), std::invalid_argument);
}

TEST_CASE("knot insertion leaves random curves invariant") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    KnotVector kv = KnotVector::uniform(6, 2);
    std::vector<double> coeffs(6);
    for (double& c : coeffs) c = dist(rng);
    const KnotVector original = kv;
    const std::vector<double> original_coeffs = coeffs;

    std::uniform_real_distribution<double> in(0.01, 0.99);
    for (int k = 0; k < 6; ++k) {
        const auto [next, c] = insert_knot(kv, coeffs, in(rng));
        kv = next;
        coeffs = c;
    }
    double worst = 0.0;
    for (int s = 0; s <= 1000; ++s) {
        const double t = s / 1000.0;
        worst = std::max(worst, std::abs(oracle::curve_value(original.knots(), 2, original_coeffs, t) -
                                         oracle::curve_value(kv.knots(), 2, coeffs, t)));
    }
    CHECK(worst < 1e-13);
}

TEST_CASE("refine_space reaches the target and preserves the geometry") {
    const KnotVector kv = benchmark_kv();
    const TensorSplineSpace space(kv, kv);
    std::vector<Vec2> net;
    const double coords[] = {0.0, 0.33, 0.66, 1.0};
    for (double y : coords)
        for (double x : coords) net.push_back({x, y});

    const RefinedSpace fine = refine_space(space, net, 18, 18);
    CHECK(fine.space.num_xi() == 18);
    CHECK(fine.space.num_eta() == 18);
    CHECK(fine.space.xi().num_spans() == 16);
    CHECK(fine.net.size() == 18 * 18);

    // Midpoint refinement of [0, 0.5, 1] lands on the uniform 1/16 grid.
    for (int i = 0; i <= 16; ++i) CHECK(fine.space.xi().multiplicity(i / 16.0) >= 1);

    // The boundary curve is reproduced point for point.
    std::vector<Vec2> coarse_bottom(net.begin(), net.begin() + 4);
    std::vector<Vec2> fine_bottom(fine.net.begin(), fine.net.begin() + 18);
    for (int s = 0; s <= 100; ++s) {
        const double t = s / 100.0;
        const Vec2 a = oracle::curve_point(kv.knots(), 2, coarse_bottom, t);
        const Vec2 b = oracle::curve_point(fine.space.xi().knots(), 2, fine_bottom, t);
        CHECK(std::abs(a.x - b.x) < 1e-13);
        CHECK(std::abs(a.y - b.y) < 1e-13);
    }

    // Ties between equal spans are broken leftmost: the first insertion into
    // [0, 0.5, 1] lands at 0.25, not 0.75.
    const RefinedSpace one_more = refine_space(space, net, 5, 4);
    CHECK(one_more.space.xi().multiplicity(0.25) == 1);
    CHECK(one_more.space.xi().multiplicity(0.75) == 0);

    const RefinedSpace same = refine_space(space, net, 4, 4);
    CHECK(same.space == space);
    for (std::size_t j = 0; j < net.size(); ++j) {
        CHECK(same.net[j].x == net[j].x);
        CHECK(same.net[j].y == net[j].y);
    }

    CHECK_THROWS_AS(refine_space(space, net, 3, 4), std::invalid_argument);
}

TEST_CASE("support overlap is the tensor band") {
    const KnotVector kv = KnotVector::uniform(18, 2);
    const TensorSplineSpace space(kv, kv);

    CHECK(space.support_overlap(0, 0));
    const int i = space.flat_index(7, 7);
    CHECK(space.support_overlap(i, space.flat_index(9, 7)));
    CHECK_FALSE(space.support_overlap(i, space.flat_index(10, 7)));
    CHECK(space.support_overlap(i, space.flat_index(9, 9)));
    CHECK_FALSE(space.support_overlap(i, space.flat_index(7, 10)));

    // At most (2p+1)^2 - 1 overlapping neighbors.
    for (int dof = 0; dof < space.num_dofs(); ++dof) {
        int neighbors = 0;
        for (int other = 0; other < space.num_dofs(); ++other)
            if (other != dof && space.support_overlap(dof, other)) ++neighbors;
        CHECK(neighbors <= 24);
    }

    CHECK(space.boundary_dofs().size() == 4 * 18 - 4);
    CHECK(space.flat_index(3, 2) == 2 * 18 + 3);
    const auto [a, b] = space.tensor_index(2 * 18 + 3);
    CHECK(a == 3);
    CHECK(b == 2);
}

TEST_CASE("greville abscissae reproduce linear functions") {
    const KnotVector kv = benchmark_kv();
    CHECK(kv.greville(0) == doctest::Approx(0.0));
    CHECK(kv.greville(1) == doctest::Approx(0.25));
    CHECK(kv.greville(2) == doctest::Approx(0.75));
    CHECK(kv.greville(3) == doctest::Approx(1.0));

    std::vector<double> g(4);
    for (int a = 0; a < 4; ++a) g[a] = kv.greville(a);
    for (int s = 0; s <= 50; ++s) {
        const double t = s / 50.0;
        CHECK(oracle::curve_value(kv.knots(), 2, g, t) == doctest::Approx(t).epsilon(1e-14));
    }
}
