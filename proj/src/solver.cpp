#include "igafc/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

namespace igafc {

namespace {

Eigen::SparseMatrix<double> to_eigen(const SparseOperator& A) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(A.pattern().nnz()));
    for (int i = 0; i < A.size(); ++i) {
        const auto cols = A.pattern().row(i);
        const auto vals = A.row_values(i);
        for (std::size_t s = 0; s < cols.size(); ++s)
            triplets.emplace_back(i, cols[s], vals[s]);
    }
    Eigen::SparseMatrix<double> m(A.size(), A.size());
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

double linf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) {
        if (std::isnan(x)) return std::numeric_limits<double>::quiet_NaN();
        m = std::max(m, std::abs(x));
    }
    return m;
}

} // namespace

struct LinearSolver::Impl {
    Method method;
    Eigen::SparseMatrix<double> matrix;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> bicgstab;
};

LinearSolver::LinearSolver(const SparseOperator& A, Method method)
    : impl_(std::make_unique<Impl>()) {
    impl_->method = method;
    impl_->matrix = to_eigen(A);
    if (method == Method::direct) {
        impl_->lu.compute(impl_->matrix);
        if (impl_->lu.info() != Eigen::Success)
            throw std::runtime_error("linear solver: sparse LU factorization failed (singular or rank-deficient matrix)");
    } else {
        impl_->bicgstab.setTolerance(1e-14);
        impl_->bicgstab.setMaxIterations(10 * A.size());
        impl_->bicgstab.compute(impl_->matrix);
        if (impl_->bicgstab.info() != Eigen::Success)
            throw std::runtime_error("linear solver: BiCGSTAB preconditioner setup failed");
    }
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

std::vector<double> LinearSolver::solve(const std::vector<double>& b) const {
    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::VectorXd x;
    if (impl_->method == Method::direct) {
        x = impl_->lu.solve(rhs);
        if (impl_->lu.info() != Eigen::Success)
            throw std::runtime_error("linear solver: back substitution failed");
    } else {
        x = impl_->bicgstab.solve(rhs);
        if (impl_->bicgstab.info() != Eigen::Success)
            throw std::runtime_error("linear solver: BiCGSTAB did not converge");
    }
    return {x.data(), x.data() + x.size()};
}

std::vector<double> solve_linear(const SparseOperator& A, const std::vector<double>& b,
                                 LinearSolver::Method method) {
    const LinearSolver solver(A, method);
    std::vector<double> x = solver.solve(b);

    std::vector<double> residual = A.apply(x);
    for (std::size_t i = 0; i < residual.size(); ++i) residual[i] -= b[i];
    if (!(linf(residual) / std::max(1.0, linf(b)) < 1e-12))
        throw std::runtime_error("solve_linear: residual contract violated");
    return x;
}

SolveReport defect_correction_solve(const TensorSplineSpace& space, const SparseOperator& S,
                                    const SparseOperator& L, const SparseOperator& K,
                                    const std::vector<double>& r, const BoundaryValues& bc,
                                    const DefectCorrectionParams& params) {
    const ConstrainedSystem sys = apply_dirichlet(space, S, L, r, bc);
    const LinearSolver factor(sys.matrix);

    SolveReport report;
    report.solution = factor.solve(sys.rhs);
    std::vector<double>& u = report.solution;

    const bool with_correction = params.limiter || params.force_alpha.has_value();
    const SparseOperator D = operator_difference(L, K);
    const EdgeSet edges = with_correction ? EdgeSet::build(L, D) : EdgeSet{};
    LimiterWorkspace work;

    const double scale = std::max(1.0, linf(sys.rhs));
    double omega = params.relaxation;
    const double omega_floor = params.relaxation / 8.0;
    int worse_streak = 0;
    int better_streak = 0;
    double prev_res = std::numeric_limits<double>::infinity();

    for (int m = 1; m <= params.max_iterations; ++m) {
        std::vector<double> rho = sys.matrix.apply(u, params.exec);
        for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = sys.rhs[i] - rho[i];
        if (with_correction) {
            const LimiterResult lim =
                limited_antidiffusion(edges, u, work, params.exec, params.force_alpha);
            for (std::size_t i = 0; i < rho.size(); ++i) rho[i] += lim.correction[i];
        }
        for (int b : sys.boundary) rho[b] = 0.0;

        const double res = linf(rho);
        if (!std::isfinite(res))
            throw std::runtime_error("defect correction: residual is not finite");
        report.residual_history.push_back(res);
        report.iterations = m;
        if (res < params.tolerance * scale) {
            report.converged = true;
            break;
        }

        // Stall damping: three consecutive residual increases halve the
        // relaxation, floored at an eighth of the starting value. A sustained
        // monotone stretch earns the step size back, capped at the start.
        if (res > prev_res) {
            if (++worse_streak >= 3) {
                omega = std::max(0.5 * omega, omega_floor);
                worse_streak = 0;
            }
            better_streak = 0;
        } else {
            worse_streak = 0;
            if (++better_streak >= 10 && omega < params.relaxation) {
                omega = std::min(2.0 * omega, params.relaxation);
                better_streak = 0;
            }
        }
        prev_res = res;

        const std::vector<double> delta = factor.solve(rho);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] += omega * delta[i];
    }

    const auto [lo, hi] = std::minmax_element(u.begin(), u.end());
    report.u_min = *lo;
    report.u_max = *hi;
    return report;
}

PecletNumber peclet_number(double diffusion, Vec2 velocity, const TensorSplineSpace& space) {
    if (diffusion <= 0.0) throw std::domain_error("peclet_number: diffusion must be positive");
    const double speed = velocity.norm();
    PecletNumber pe;
    pe.xi = speed / (2.0 * diffusion * space.num_xi());
    pe.eta = speed / (2.0 * diffusion * space.num_eta());
    pe.max = std::max(pe.xi, pe.eta);
    return pe;
}

} // namespace igafc
