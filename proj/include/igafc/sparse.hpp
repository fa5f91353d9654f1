#pragma once

#include <memory>
#include <span>
#include <vector>

#include "igafc/common.hpp"
#include "igafc/spline.hpp"

namespace igafc {

/// Fixed CSR sparsity pattern. Rows hold sorted column indices; the pattern
/// is symmetric as a set and always contains the diagonal.
class SparsityPattern {
public:
    /// Support-overlap pattern of a tensor-product space: (i, j) present iff
    /// the tensor indices differ by at most the degree per direction.
    static std::shared_ptr<const SparsityPattern> tensor_overlap(const TensorSplineSpace& space);

    /// Support-overlap pattern of a univariate space: |i - j| <= degree.
    static std::shared_ptr<const SparsityPattern> univariate_overlap(const KnotVector& kv);

    int size() const { return n_; }
    int nnz() const { return static_cast<int>(cols_.size()); }

    std::span<const int> row(int i) const {
        return {cols_.data() + row_ptr_[i], cols_.data() + row_ptr_[i + 1]};
    }
    int row_begin(int i) const { return row_ptr_[i]; }

    /// Storage slot of entry (i, j), or -1 when (i, j) is outside the pattern.
    int find(int i, int j) const;

private:
    SparsityPattern(int n, std::vector<int> row_ptr, std::vector<int> cols)
        : n_(n), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)) {}

    int n_;
    std::vector<int> row_ptr_;
    std::vector<int> cols_;
};

/// Square sparse matrix over the DOFs with a shared immutable pattern.
/// Entry lookup outside the pattern reads as exactly 0; writes outside the
/// pattern throw.
class SparseOperator {
public:
    explicit SparseOperator(std::shared_ptr<const SparsityPattern> pattern);

    int size() const { return pattern_->size(); }
    const SparsityPattern& pattern() const { return *pattern_; }
    std::shared_ptr<const SparsityPattern> pattern_ptr() const { return pattern_; }

    double operator()(int i, int j) const {
        const int s = pattern_->find(i, j);
        return s < 0 ? 0.0 : values_[static_cast<std::size_t>(s)];
    }
    double& at(int i, int j);
    void add(int i, int j, double v) { at(i, j) += v; }

    std::span<const double> row_values(int i) const {
        return {values_.data() + pattern_->row_begin(i),
                values_.data() + pattern_->row_begin(i + 1)};
    }
    std::span<double> row_values(int i) {
        return {values_.data() + pattern_->row_begin(i),
                values_.data() + pattern_->row_begin(i + 1)};
    }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    /// y = A u. Row-parallel under Exec::parallel; bitwise identical to the
    /// serial path for any thread count.
    std::vector<double> apply(std::span<const double> u, Exec exec = Exec::serial) const;

    double row_sum(int i) const;

private:
    std::shared_ptr<const SparsityPattern> pattern_;
    std::vector<double> values_;
};

/// Entrywise A + B on a shared pattern; throws std::invalid_argument on
/// pattern mismatch.
SparseOperator operator_sum(const SparseOperator& a, const SparseOperator& b);

/// Entrywise A - B on a shared pattern.
SparseOperator operator_difference(const SparseOperator& a, const SparseOperator& b);

} // namespace igafc
