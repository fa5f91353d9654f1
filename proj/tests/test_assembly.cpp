#include <doctest.h>

#include <cmath>

#include "igafc/assembly.hpp"
#include "igafc/quadrature.hpp"

using namespace igafc;

namespace {

TensorSplineSpace benchmark_space() {
    const KnotVector kv({0, 0, 0, 0.5, 1, 1, 1}, 2);
    return {kv, kv};
}

std::vector<Vec2> square_net() {
    std::vector<Vec2> net;
    const double c[] = {0.0, 0.33, 0.66, 1.0};
    for (double y : c)
        for (double x : c) net.push_back({x, y});
    return net;
}

std::vector<Vec2> deformed_net() {
    return {{0, 0},      {0.33, -0.2}, {0.66, 0},    {1, 0},       //
            {-0.2, 0.33}, {0.4, 0.33}, {0.66, 0.33}, {1, 0.33},    //
            {0, 0.66},   {0.33, 0.9},  {0.66, 0.9},  {1.2, 0.66},  //
            {0, 1},      {0.33, 1},    {0.66, 1},    {1, 1}};
}

const Vec2 benchmark_velocity{std::sqrt(2.0), std::sqrt(2.0)};

} // namespace

TEST_CASE("univariate p=1 assembly reproduces the hat-function stencils") {
    const int n = 8;
    const KnotVector kv = KnotVector::uniform(n, 1);
    const double h = 1.0 / (n - 1);

    const SparseOperator M = assemble_mass_1d(kv, 2);
    const SparseOperator A = assemble_stiffness_1d(kv, 2);
    const SparseOperator K = assemble_convection_1d(kv, 2, 1.0);

    for (int i = 1; i < n - 1; ++i) {
        CHECK(M(i, i - 1) == doctest::Approx(h / 6.0).epsilon(1e-12));
        CHECK(M(i, i) == doctest::Approx(2.0 * h / 3.0).epsilon(1e-12));
        CHECK(M(i, i + 1) == doctest::Approx(h / 6.0).epsilon(1e-12));

        CHECK(A(i, i - 1) == doctest::Approx(-1.0 / h).epsilon(1e-12));
        CHECK(A(i, i) == doctest::Approx(2.0 / h).epsilon(1e-12));
        CHECK(A(i, i + 1) == doctest::Approx(-1.0 / h).epsilon(1e-12));

        // k_ij = -v c_ij with the (-1/2, 0, 1/2) gradient integrals.
        CHECK(K(i, i - 1) == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(std::abs(K(i, i)) < 1e-14);
        CHECK(K(i, i + 1) == doctest::Approx(-0.5).epsilon(1e-12));
    }

    const std::vector<double> ones = assemble_rhs_1d(kv, 2, [](double) { return 1.0; });
    double total = 0.0;
    for (double v : ones) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("2D p=1 assembly equals the tensor product of the 1D stencils") {
    const int n = 6;
    const KnotVector kv = KnotVector::uniform(n, 1);
    const TensorSplineSpace space(kv, kv);
    const GeometryMap identity(space, greville_net(space));
    const QuadratureRule quad(space, 2);

    const SparseOperator M2 = assemble_mass(space, identity, quad);
    const SparseOperator M1 = assemble_mass_1d(kv, 2);
    const SparseOperator A1 = assemble_stiffness_1d(kv, 2);
    const SparseOperator S2 = assemble_diffusion(space, identity, quad, 1.0);
    const SparseOperator C1 = assemble_convection_1d(kv, 2, 1.0);
    const SparseOperator K2 =
        assemble_convection(space, identity, quad, [](Vec2) { return Vec2{1.0, 0.0}; });

    for (int i = 0; i < space.num_dofs(); ++i) {
        const auto [ai, bi] = space.tensor_index(i);
        for (int j : M2.pattern().row(i)) {
            const auto [aj, bj] = space.tensor_index(j);
            CHECK(M2(i, j) == doctest::Approx(M1(ai, aj) * M1(bi, bj)).epsilon(1e-12));
            CHECK(S2(i, j) ==
                  doctest::Approx(A1(ai, aj) * M1(bi, bj) + M1(ai, aj) * A1(bi, bj)).epsilon(1e-12));
            CHECK(K2(i, j) == doctest::Approx(C1(ai, aj) * M1(bi, bj)).epsilon(1e-12));
        }
    }
}

TEST_CASE("convection: zero row sums and interior skew-symmetry") {
    const TensorSplineSpace coarse = benchmark_space();
    const GeometryMap geom = GeometryMap(coarse, deformed_net()).refined(12, 12);
    const TensorSplineSpace& space = geom.space();
    const QuadratureRule quad(space, 3);
    const SparseOperator K =
        assemble_convection(space, geom, quad, [](Vec2) { return benchmark_velocity; });

    for (int i = 0; i < K.size(); ++i) CHECK(std::abs(K.row_sum(i)) < 1e-12);

    // Pairs whose supports stay away from the boundary: integration by parts
    // without a boundary term gives k_ij = -k_ji.
    const int p = 2;
    const int n = space.num_xi();
    auto interior = [&](int dof) {
        const auto [a, b] = space.tensor_index(dof);
        return a > p && a < n - 1 - p && b > p && b < n - 1 - p;
    };
    int pairs = 0;
    for (int i = 0; i < K.size(); ++i) {
        if (!interior(i)) continue;
        for (int j : K.pattern().row(i)) {
            if (j <= i || !interior(j)) continue;
            CHECK(std::abs(K(i, j) + K(j, i)) < 1e-10);
            ++pairs;
        }
    }
    CHECK(pairs > 100);
}

TEST_CASE("diffusion: bitwise symmetric with zero row sums") {
    const TensorSplineSpace coarse = benchmark_space();
    const GeometryMap geom = GeometryMap(coarse, deformed_net()).refined(10, 10);
    const TensorSplineSpace& space = geom.space();
    const QuadratureRule quad(space, 3);
    const SparseOperator S = assemble_diffusion(space, geom, quad, 1e-4);

    double max_asym = 0.0;
    for (int i = 0; i < S.size(); ++i)
        for (int j : S.pattern().row(i)) max_asym = std::max(max_asym, std::abs(S(i, j) - S(j, i)));
    CHECK(max_asym < 1e-13);

    for (int i = 0; i < S.size(); ++i) CHECK(std::abs(S.row_sum(i)) < 1e-12);

    CHECK_THROWS_AS(assemble_diffusion(space, geom, quad, -1.0), std::invalid_argument);
}

TEST_CASE("mass: nonnegative entries summing to the domain area") {
    const TensorSplineSpace coarse = benchmark_space();
    const GeometryMap geom = GeometryMap(coarse, square_net()).refined(10, 10);
    const TensorSplineSpace& space = geom.space();
    const QuadratureRule quad(space, 3);
    const SparseOperator M = assemble_mass(space, geom, quad);

    double total = 0.0;
    for (int i = 0; i < M.size(); ++i)
        for (double v : M.row_values(i)) {
            CHECK(v >= 0.0);
            total += v;
        }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("load vector: zero, constant and linear sources") {
    const TensorSplineSpace coarse = benchmark_space();
    const GeometryMap geom = GeometryMap(coarse, square_net()).refined(8, 8);
    const TensorSplineSpace& space = geom.space();
    const QuadratureRule quad(space, 3);

    const std::vector<double> zero = assemble_rhs(space, geom, quad, [](Vec2) { return 0.0; });
    for (double v : zero) CHECK(v == 0.0);

    const std::vector<double> ones = assemble_rhs(space, geom, quad, [](Vec2) { return 1.0; });
    double total = 0.0;
    for (double v : ones) total += v;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

    // R(x, y) = x on the identity-mapped square integrates to 1/2.
    const GeometryMap identity(space, greville_net(space));
    const std::vector<double> linear =
        assemble_rhs(space, identity, quad, [](Vec2 x) { return x.x; });
    total = 0.0;
    for (double v : linear) total += v;
    CHECK(total == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("quadrature refinement leaves the rational integrands converged") {
    const TensorSplineSpace coarse = benchmark_space();
    const GeometryMap geom = GeometryMap(coarse, deformed_net()).refined(10, 10);
    const TensorSplineSpace& space = geom.space();

    // The convection integrand reduces to a polynomial (the adjugate absorbs
    // the determinant), so q = p+1 already integrates it to machine
    // precision.
    const SparseOperator k_low = assemble_convection(space, geom, QuadratureRule(space, 3),
                                                     [](Vec2) { return benchmark_velocity; });
    const SparseOperator k_high = assemble_convection(space, geom, QuadratureRule(space, 9),
                                                      [](Vec2) { return benchmark_velocity; });
    double worst_k = 0.0;
    for (std::size_t s = 0; s < k_low.values().size(); ++s)
        worst_k = std::max(worst_k, std::abs(k_low.values()[s] - k_high.values()[s]));
    CHECK(worst_k < 1e-12);

    // The diffusion integrand is genuinely rational through 1/|det J|;
    // successive rules must contract geometrically down to 1e-8.
    std::vector<double> diffs;
    SparseOperator prev = assemble_diffusion(space, geom, QuadratureRule(space, 3), 1.0);
    for (int q = 5; q <= 9; q += 2) {
        const SparseOperator next = assemble_diffusion(space, geom, QuadratureRule(space, q), 1.0);
        double d = 0.0;
        for (std::size_t s = 0; s < next.values().size(); ++s)
            d = std::max(d, std::abs(next.values()[s] - prev.values()[s]));
        diffs.push_back(d);
        prev = next;
    }
    CHECK(diffs[1] < 1e-2 * diffs[0]);
    CHECK(diffs[2] < 1e-2 * diffs[1]);
    CHECK(diffs[2] < 1e-8);
}

TEST_CASE("sparse operator contract: pattern symmetry, diagonal, zero outside") {
    const TensorSplineSpace space(KnotVector::uniform(6, 2), KnotVector::uniform(5, 2));
    const auto pattern = SparsityPattern::tensor_overlap(space);
    for (int i = 0; i < pattern->size(); ++i) {
        CHECK(pattern->find(i, i) >= 0);
        for (int j : pattern->row(i)) CHECK(pattern->find(j, i) >= 0);
    }

    SparseOperator A(pattern);
    CHECK(A(0, pattern->size() - 1) == 0.0);
    CHECK_THROWS_AS(A.at(0, pattern->size() - 1), std::out_of_range);

    const SparseOperator B(pattern);
    const SparseOperator sum = operator_sum(A, B);
    CHECK(sum.size() == A.size());
    const auto other = SparsityPattern::univariate_overlap(KnotVector::uniform(6, 2));
    CHECK_THROWS_AS(operator_sum(A, SparseOperator(other)), std::invalid_argument);
}
