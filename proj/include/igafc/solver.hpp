#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "igafc/afc.hpp"
#include "igafc/sparse.hpp"

namespace igafc {

/// Direct sparse factorization of a constrained system matrix, reused across
/// defect-correction iterations.
class LinearSolver {
public:
    enum class Method { direct, bicgstab };

    explicit LinearSolver(const SparseOperator& A, Method method = Method::direct);
    ~LinearSolver();
    LinearSolver(LinearSolver&&) noexcept;
    LinearSolver& operator=(LinearSolver&&) noexcept;

    std::vector<double> solve(const std::vector<double>& b) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// One-shot solve of A x = b with the residual contract
/// ||Ax - b||_inf / max(1, ||b||_inf) < 1e-12. Throws std::runtime_error when
/// the factorization fails or the contract cannot be met.
std::vector<double> solve_linear(const SparseOperator& A, const std::vector<double>& b,
                                 LinearSolver::Method method = LinearSolver::Method::direct);

struct SolveReport {
    int iterations = 0;
    std::vector<double> residual_history;
    bool converged = false;
    std::vector<double> solution;
    double u_min = 0.0;
    double u_max = 0.0;
};

struct DefectCorrectionParams {
    double tolerance = 1e-8;
    int max_iterations = 500;
    double relaxation = 1.0;              ///< halved (down to 1/8 of the start) on stalls
    bool limiter = true;                  ///< false solves the linear low-order scheme
    std::optional<double> force_alpha;    ///< pin every correction factor to 0 or 1
    Exec exec = Exec::serial;
};

/// Fixed-point defect correction for the nonlinear flux-corrected scheme
/// (S - L) u = r + f_bar(u). The constrained low-order matrix A = S - L is
/// factorized once; u0 solves the linear low-order scheme, and each step adds
/// omega * A^-1 rho with rho = r + f_bar(u) - A u (boundary rows zeroed).
/// Non-convergence yields converged = false, not an exception; a NaN residual
/// is a hard error.
SolveReport defect_correction_solve(const TensorSplineSpace& space, const SparseOperator& S,
                                    const SparseOperator& L, const SparseOperator& K,
                                    const std::vector<double>& r, const BoundaryValues& bc,
                                    const DefectCorrectionParams& params = {});

struct PecletNumber {
    double xi = 0.0;
    double eta = 0.0;
    double max = 0.0;
};

/// Element Peclet number ||v||_2 h / (2 d) per direction, h taken as the
/// reciprocal of the basis count in that direction. Throws std::domain_error
/// for d <= 0.
PecletNumber peclet_number(double diffusion, Vec2 velocity, const TensorSplineSpace& space);

} // namespace igafc
