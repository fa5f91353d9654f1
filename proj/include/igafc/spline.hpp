#pragma once

#include <span>
#include <utility>
#include <vector>

#include "igafc/common.hpp"

namespace igafc {

/// The possibly nonzero basis functions at one parameter value: the p+1
/// functions with indices first() .. first()+p. Derivative rows are present
/// up to the order requested from eval_basis_derivs; orders above the degree
/// are exact zeros.
struct BasisSpan {
    int span = 0;                              ///< knot interval index k, xi in [knot_k, knot_{k+1})
    int degree = 0;
    std::vector<double> values;                ///< p+1 basis values
    std::vector<std::vector<double>> derivs;   ///< derivs[m-1][j] = m-th derivative, m = 1..order

    int first() const { return span - degree; }
};

/// Open (clamped) knot vector for a univariate B-spline space of degree p.
///
/// Invariants enforced at construction: knots nondecreasing, first and last
/// knot each repeated exactly p+1 times, interior multiplicity at most p+1,
/// and at least p+1 basis functions.
class KnotVector {
public:
    KnotVector(std::vector<double> knots, int degree);

    /// Uniform open knot vector on [0,1] with the given basis count.
    static KnotVector uniform(int num_basis, int degree);

    int degree() const { return degree_; }
    int num_basis() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
    int num_spans() const;                       ///< nonempty knot intervals
    double front() const { return knots_.front(); }
    double back() const { return knots_.back(); }
    const std::vector<double>& knots() const { return knots_; }
    double knot(int i) const { return knots_[static_cast<std::size_t>(i)]; }

    /// Multiplicity of the value xi in the knot vector (0 if absent).
    int multiplicity(double xi) const;

    /// Greville abscissa of basis function a: the average of knots a+1 .. a+p.
    double greville(int a) const;

    /// Index k of the nonempty span with knot_k <= xi < knot_{k+1}; at the
    /// right end the last nonempty span is returned. Throws std::domain_error
    /// for xi outside [front(), back()].
    int find_span(double xi) const;

    /// Values of the p+1 active basis functions at xi (Cox-de-Boor recursion,
    /// 0/0 taken as 0).
    BasisSpan eval_basis(double xi) const;

    /// Values and derivatives up to `order` of the active basis functions.
    /// Orders above the degree come back as exact zeros.
    BasisSpan eval_basis_derivs(double xi, int order) const;

    bool operator==(const KnotVector& o) const = default;

private:
    std::vector<double> knots_;
    int degree_;
};

/// Result of inserting one knot: the enlarged knot vector plus the blending
/// band for the control values. Coefficient i of the refined curve is
/// alpha[i] * old[i] + (1 - alpha[i]) * old[i-1] for i in [band_begin,
/// band_end), a plain copy of old[i] before the band and of old[i-1] after.
struct KnotInsertion {
    KnotVector kv;
    int band_begin = 0;
    int band_end = 0;
    std::vector<double> alpha;   ///< size band_end - band_begin

    template <typename T>
    std::vector<T> apply(const std::vector<T>& coeffs) const {
        std::vector<T> out(coeffs.size() + 1);
        for (int i = 0; i < band_begin; ++i) out[i] = coeffs[i];
        for (int i = band_begin; i < band_end; ++i) {
            const double a = alpha[static_cast<std::size_t>(i - band_begin)];
            out[i] = a * coeffs[i] + (1.0 - a) * coeffs[i - 1];
        }
        for (std::size_t i = band_end; i < out.size(); ++i) out[i] = coeffs[i - 1];
        return out;
    }
};

/// Single-knot insertion at xi_bar (Boehm's algorithm). The represented
/// spline is unchanged. Throws std::domain_error if xi_bar is at or outside
/// the ends, std::invalid_argument if the resulting multiplicity would
/// exceed the degree.
KnotInsertion plan_knot_insertion(const KnotVector& kv, double xi_bar);

template <typename T>
std::pair<KnotVector, std::vector<T>> insert_knot(const KnotVector& kv,
                                                  const std::vector<T>& coeffs,
                                                  double xi_bar) {
    KnotInsertion ins = plan_knot_insertion(kv, xi_bar);
    std::vector<T> out = ins.apply(coeffs);
    return {std::move(ins.kv), std::move(out)};
}

/// Bivariate tensor-product B-spline space. Flat DOF index j maps to the
/// tensor pair (a, b) row-major in xi: j = b * num_xi() + a.
class TensorSplineSpace {
public:
    TensorSplineSpace(KnotVector kv_xi, KnotVector kv_eta);

    const KnotVector& xi() const { return kv_xi_; }
    const KnotVector& eta() const { return kv_eta_; }
    int num_xi() const { return kv_xi_.num_basis(); }
    int num_eta() const { return kv_eta_.num_basis(); }
    int num_dofs() const { return num_xi() * num_eta(); }

    int flat_index(int a, int b) const { return b * num_xi() + a; }
    std::pair<int, int> tensor_index(int j) const { return {j % num_xi(), j / num_xi()}; }

    /// True iff basis functions i and j can share support: their tensor
    /// indices differ by at most the degree in each direction. This is the
    /// sparsity pattern of every assembled operator.
    bool support_overlap(int i, int j) const;

    /// True iff DOF j sits on the boundary ring of the tensor grid.
    bool is_boundary(int j) const;

    /// Sorted flat indices of the boundary ring.
    std::vector<int> boundary_dofs() const;

    /// Parametric Greville anchor of DOF j.
    Vec2 greville(int j) const;

    bool operator==(const TensorSplineSpace& o) const = default;

private:
    KnotVector kv_xi_;
    KnotVector kv_eta_;
};

/// Evaluate a scalar spline field sum_j coeffs[j] * phi_j(xi, eta) using only
/// the active basis functions.
double eval_field(const TensorSplineSpace& space, std::span<const double> coeffs,
                  double xi, double eta);

struct RefinedSpace {
    TensorSplineSpace space;
    std::vector<Vec2> net;
};

/// Refine by repeated single-knot insertion, placing each new knot at the
/// midpoint of the currently largest nonempty span (ties broken leftmost),
/// until the requested basis counts are reached. Every row/column of the
/// control net is transformed with the insertion band, so the represented
/// geometry is unchanged. Throws std::invalid_argument if a target is below
/// the current count.
RefinedSpace refine_space(const TensorSplineSpace& space, const std::vector<Vec2>& net,
                          int target_xi, int target_eta);

/// Univariate counterpart used by refine_space and the tests.
std::pair<KnotVector, std::vector<double>> refine_curve(const KnotVector& kv,
                                                        const std::vector<double>& coeffs,
                                                        int target_basis);

} // namespace igafc
