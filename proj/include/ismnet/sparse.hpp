#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace ismnet {

/// Dense row-major real matrix. Used for feature blocks, embeddings and
/// network weights; sizes stay small (n_h x d).
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    DenseMatrix transposed() const;

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// C = A * B
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
/// C = A^T * B
DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b);
/// C = A * B^T
DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b);
/// y += alpha * x, shapes must agree.
void axpy(double alpha, const DenseMatrix& x, DenseMatrix& y);

struct Triplet {
    std::uint32_t row;
    std::uint32_t col;
    double value;
};

/// Row-compressed sparse real matrix.
///
/// Column indices inside a row are strictly increasing and no explicit
/// zeros are stored. Instances are immutable once built.
class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(std::size_t rows, std::size_t cols);

    /// Duplicate (row, col) entries are summed; entries summing to zero are dropped.
    static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries);
    static CsrMatrix identity(std::size_t n);
    static CsrMatrix from_dense(const DenseMatrix& m);
    /// Adopts already-compressed arrays; caller guarantees sorted, zero-free rows.
    static CsrMatrix from_parts(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                                std::vector<std::uint32_t> col_idx, std::vector<double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    std::span<const std::uint32_t> col_indices() const noexcept { return col_idx_; }
    std::span<const double> values() const noexcept { return values_; }

    std::span<const std::uint32_t> row_cols(std::size_t r) const {
        return {col_idx_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
    }
    std::span<const double> row_values(std::size_t r) const {
        return {values_.data() + row_ptr_[r], row_ptr_[r + 1] - row_ptr_[r]};
    }

    /// Stored value or 0.
    double at(std::size_t r, std::size_t c) const;

    CsrMatrix transposed() const;
    DenseMatrix to_dense() const;

    std::vector<double> row_sums() const;
    std::vector<double> col_sums() const;

    /// diag(left) * this * diag(right); zero products are pruned.
    CsrMatrix scaled(std::span<const double> left, std::span<const double> right) const;

    bool operator==(const CsrMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::uint32_t> col_idx_;
    std::vector<double> values_;
};

/// Sparse-sparse product (row-wise Gustavson accumulation).
CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b);
/// alpha * A + beta * B
CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha = 1.0, double beta = 1.0);
/// Sparse times dense.
DenseMatrix multiply(const CsrMatrix& a, const DenseMatrix& x);

/// Matrix-market coordinate dump (1-based indices).
void write_matrix_market(std::ostream& out, const CsrMatrix& m);

}  // namespace ismnet
