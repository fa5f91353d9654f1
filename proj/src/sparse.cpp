#include "igafc/sparse.hpp"

#include <algorithm>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace igafc {

std::shared_ptr<const SparsityPattern> SparsityPattern::tensor_overlap(
    const TensorSplineSpace& space) {
    const int n = space.num_dofs();
    const int nx = space.num_xi();
    const int ny = space.num_eta();
    const int px = space.xi().degree();
    const int py = space.eta().degree();

    std::vector<int> row_ptr(n + 1, 0);
    std::vector<int> cols;
    cols.reserve(static_cast<std::size_t>(n) * (2 * px + 1) * (2 * py + 1));
    for (int b = 0; b < ny; ++b) {
        for (int a = 0; a < nx; ++a) {
            const int i = b * nx + a;
            for (int bb = std::max(0, b - py); bb <= std::min(ny - 1, b + py); ++bb)
                for (int aa = std::max(0, a - px); aa <= std::min(nx - 1, a + px); ++aa)
                    cols.push_back(bb * nx + aa);
            row_ptr[i + 1] = static_cast<int>(cols.size());
        }
    }
    return std::shared_ptr<const SparsityPattern>(
        new SparsityPattern(n, std::move(row_ptr), std::move(cols)));
}

std::shared_ptr<const SparsityPattern> SparsityPattern::univariate_overlap(const KnotVector& kv) {
    const int n = kv.num_basis();
    const int p = kv.degree();
    std::vector<int> row_ptr(n + 1, 0);
    std::vector<int> cols;
    for (int i = 0; i < n; ++i) {
        for (int j = std::max(0, i - p); j <= std::min(n - 1, i + p); ++j) cols.push_back(j);
        row_ptr[i + 1] = static_cast<int>(cols.size());
    }
    return std::shared_ptr<const SparsityPattern>(
        new SparsityPattern(n, std::move(row_ptr), std::move(cols)));
}

int SparsityPattern::find(int i, int j) const {
    const auto r = row(i);
    const auto it = std::lower_bound(r.begin(), r.end(), j);
    if (it == r.end() || *it != j) return -1;
    return row_ptr_[i] + static_cast<int>(it - r.begin());
}

SparseOperator::SparseOperator(std::shared_ptr<const SparsityPattern> pattern)
    : pattern_(std::move(pattern)), values_(static_cast<std::size_t>(pattern_->nnz()), 0.0) {}

double& SparseOperator::at(int i, int j) {
    const int s = pattern_->find(i, j);
    if (s < 0) throw std::out_of_range("sparse operator: entry outside the sparsity pattern");
    return values_[static_cast<std::size_t>(s)];
}

std::vector<double> SparseOperator::apply(std::span<const double> u, Exec exec) const {
    const int n = size();
    std::vector<double> y(static_cast<std::size_t>(n), 0.0);

    auto row_product = [&](int i) {
        const auto cols = pattern_->row(i);
        const auto vals = row_values(i);
        double sum = 0.0;
        for (std::size_t s = 0; s < cols.size(); ++s) sum += vals[s] * u[cols[s]];
        y[i] = sum;
    };

    if (exec == Exec::parallel) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) row_product(i);
        return y;
#endif
    }
    for (int i = 0; i < n; ++i) row_product(i);
    return y;
}

double SparseOperator::row_sum(int i) const {
    double sum = 0.0;
    for (double v : row_values(i)) sum += v;
    return sum;
}

namespace {

void require_matching(const SparseOperator& a, const SparseOperator& b) {
    if (a.pattern_ptr() == b.pattern_ptr()) return;
    if (a.size() != b.size() || a.pattern().nnz() != b.pattern().nnz())
        throw std::invalid_argument("sparse operator: pattern mismatch");
    for (int i = 0; i < a.size(); ++i) {
        const auto ra = a.pattern().row(i);
        const auto rb = b.pattern().row(i);
        if (!std::equal(ra.begin(), ra.end(), rb.begin(), rb.end()))
            throw std::invalid_argument("sparse operator: pattern mismatch");
    }
}

} // namespace

SparseOperator operator_sum(const SparseOperator& a, const SparseOperator& b) {
    require_matching(a, b);
    SparseOperator out(a.pattern_ptr());
    for (std::size_t s = 0; s < out.values().size(); ++s)
        out.values()[s] = a.values()[s] + b.values()[s];
    return out;
}

SparseOperator operator_difference(const SparseOperator& a, const SparseOperator& b) {
    require_matching(a, b);
    SparseOperator out(a.pattern_ptr());
    for (std::size_t s = 0; s < out.values().size(); ++s)
        out.values()[s] = a.values()[s] - b.values()[s];
    return out;
}

} // namespace igafc
