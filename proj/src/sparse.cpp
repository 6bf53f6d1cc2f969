#include "ismnet/sparse.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "ismnet/error.hpp"

namespace ismnet {

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

DenseMatrix DenseMatrix::transposed() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matmul: inner dimensions differ");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto out = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double v = a(i, k);
            if (v == 0.0) continue;
            auto brow = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) out[j] += v * brow[j];
        }
    }
    return c;
}

DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) throw DimensionError("matmul_tn: row counts differ");
    DenseMatrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        auto arow = a.row(k);
        auto brow = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double v = arow[i];
            if (v == 0.0) continue;
            auto out = c.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) out[j] += v * brow[j];
        }
    }
    return c;
}

DenseMatrix matmul_nt(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols()) throw DimensionError("matmul_nt: column counts differ");
    DenseMatrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto arow = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            auto brow = b.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += arow[k] * brow[k];
            c(i, j) = s;
        }
    }
    return c;
}

void axpy(double alpha, const DenseMatrix& x, DenseMatrix& y) {
    if (x.rows() != y.rows() || x.cols() != y.cols()) throw DimensionError("axpy: shape mismatch");
    auto xs = x.data();
    auto ys = y.data();
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] += alpha * xs[i];
}

CsrMatrix::CsrMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

CsrMatrix CsrMatrix::from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> entries) {
    for (const auto& t : entries)
        if (t.row >= rows || t.col >= cols) throw DimensionError("triplet index out of range");
    std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m(rows, cols);
    m.col_idx_.reserve(entries.size());
    m.values_.reserve(entries.size());
    std::size_t i = 0;
    while (i < entries.size()) {
        const auto r = entries[i].row;
        const auto c = entries[i].col;
        double v = 0.0;
        for (; i < entries.size() && entries[i].row == r && entries[i].col == c; ++i) v += entries[i].value;
        if (v == 0.0) continue;
        m.col_idx_.push_back(c);
        m.values_.push_back(v);
        ++m.row_ptr_[r + 1];
    }
    for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
    CsrMatrix m(n, n);
    m.col_idx_.resize(n);
    m.values_.assign(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        m.col_idx_[i] = static_cast<std::uint32_t>(i);
        m.row_ptr_[i + 1] = i + 1;
    }
    return m;
}

CsrMatrix CsrMatrix::from_dense(const DenseMatrix& d) {
    CsrMatrix m(d.rows(), d.cols());
    for (std::size_t r = 0; r < d.rows(); ++r) {
        for (std::size_t c = 0; c < d.cols(); ++c) {
            if (d(r, c) == 0.0) continue;
            m.col_idx_.push_back(static_cast<std::uint32_t>(c));
            m.values_.push_back(d(r, c));
        }
        m.row_ptr_[r + 1] = m.values_.size();
    }
    return m;
}

CsrMatrix CsrMatrix::from_parts(std::size_t rows, std::size_t cols, std::vector<std::size_t> row_ptr,
                                std::vector<std::uint32_t> col_idx, std::vector<double> values) {
    if (row_ptr.size() != rows + 1 || col_idx.size() != values.size() || row_ptr.back() != values.size())
        throw DimensionError("from_parts: inconsistent CSR arrays");
    CsrMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_ptr_ = std::move(row_ptr);
    m.col_idx_ = std::move(col_idx);
    m.values_ = std::move(values);
    return m;
}

double CsrMatrix::at(std::size_t r, std::size_t c) const {
    auto cols = row_cols(r);
    auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<std::uint32_t>(c));
    if (it == cols.end() || *it != c) return 0.0;
    return values_[row_ptr_[r] + static_cast<std::size_t>(it - cols.begin())];
}

CsrMatrix CsrMatrix::transposed() const {
    CsrMatrix t(cols_, rows_);
    t.col_idx_.resize(nnz());
    t.values_.resize(nnz());
    for (auto c : col_idx_) ++t.row_ptr_[c + 1];
    for (std::size_t c = 0; c < cols_; ++c) t.row_ptr_[c + 1] += t.row_ptr_[c];
    std::vector<std::size_t> next(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
    // Rows are visited in order, so each transposed row receives ascending columns.
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const auto dst = next[col_idx_[k]]++;
            t.col_idx_[dst] = static_cast<std::uint32_t>(r);
            t.values_[dst] = values_[k];
        }
    }
    return t;
}

DenseMatrix CsrMatrix::to_dense() const {
    DenseMatrix d(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) d(r, col_idx_[k]) = values_[k];
    return d;
}

std::vector<double> CsrMatrix::row_sums() const {
    std::vector<double> s(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s[r] += values_[k];
    return s;
}

std::vector<double> CsrMatrix::col_sums() const {
    std::vector<double> s(cols_, 0.0);
    for (std::size_t k = 0; k < nnz(); ++k) s[col_idx_[k]] += values_[k];
    return s;
}

CsrMatrix CsrMatrix::scaled(std::span<const double> left, std::span<const double> right) const {
    if (left.size() != rows_ || right.size() != cols_) throw DimensionError("scaled: diagonal size mismatch");
    CsrMatrix m(rows_, cols_);
    m.col_idx_.reserve(nnz());
    m.values_.reserve(nnz());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            const double v = left[r] * values_[k] * right[col_idx_[k]];
            if (v == 0.0) continue;
            m.col_idx_.push_back(col_idx_[k]);
            m.values_.push_back(v);
        }
        m.row_ptr_[r + 1] = m.values_.size();
    }
    return m;
}

CsrMatrix multiply(const CsrMatrix& a, const CsrMatrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimensions differ");
    std::vector<std::size_t> row_ptr(a.rows() + 1, 0);
    std::vector<std::uint32_t> cols;
    std::vector<double> vals;

    std::vector<double> acc(b.cols(), 0.0);
    std::vector<std::uint8_t> touched(b.cols(), 0);
    std::vector<std::uint32_t> pattern;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        pattern.clear();
        auto acols = a.row_cols(i);
        auto avals = a.row_values(i);
        for (std::size_t p = 0; p < acols.size(); ++p) {
            auto bcols = b.row_cols(acols[p]);
            auto bvals = b.row_values(acols[p]);
            for (std::size_t q = 0; q < bcols.size(); ++q) {
                const auto j = bcols[q];
                if (!touched[j]) {
                    touched[j] = 1;
                    pattern.push_back(j);
                }
                acc[j] += avals[p] * bvals[q];
            }
        }
        std::sort(pattern.begin(), pattern.end());
        for (auto j : pattern) {
            if (acc[j] != 0.0) {
                cols.push_back(j);
                vals.push_back(acc[j]);
            }
            acc[j] = 0.0;
            touched[j] = 0;
        }
        row_ptr[i + 1] = vals.size();
    }
    return CsrMatrix::from_parts(a.rows(), b.cols(), std::move(row_ptr), std::move(cols), std::move(vals));
}

CsrMatrix add(const CsrMatrix& a, const CsrMatrix& b, double alpha, double beta) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("add: shape mismatch");
    std::vector<std::size_t> row_ptr(a.rows() + 1, 0);
    std::vector<std::uint32_t> cols;
    std::vector<double> vals;
    auto emit = [&](std::uint32_t c, double v) {
        if (v == 0.0) return;
        cols.push_back(c);
        vals.push_back(v);
    };
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto ac = a.row_cols(r);
        auto av = a.row_values(r);
        auto bc = b.row_cols(r);
        auto bv = b.row_values(r);
        std::size_t p = 0, q = 0;
        while (p < ac.size() || q < bc.size()) {
            if (q == bc.size() || (p < ac.size() && ac[p] < bc[q])) {
                emit(ac[p], alpha * av[p]);
                ++p;
            } else if (p == ac.size() || bc[q] < ac[p]) {
                emit(bc[q], beta * bv[q]);
                ++q;
            } else {
                emit(ac[p], alpha * av[p] + beta * bv[q]);
                ++p;
                ++q;
            }
        }
        row_ptr[r + 1] = vals.size();
    }
    return CsrMatrix::from_parts(a.rows(), a.cols(), std::move(row_ptr), std::move(cols), std::move(vals));
}

DenseMatrix multiply(const CsrMatrix& a, const DenseMatrix& x) {
    if (a.cols() != x.rows()) throw DimensionError("multiply: sparse/dense inner dimensions differ");
    DenseMatrix y(a.rows(), x.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto out = y.row(r);
        auto cols = a.row_cols(r);
        auto vals = a.row_values(r);
        for (std::size_t p = 0; p < cols.size(); ++p) {
            auto xr = x.row(cols[p]);
            for (std::size_t j = 0; j < xr.size(); ++j) out[j] += vals[p] * xr[j];
        }
    }
    return y;
}

void write_matrix_market(std::ostream& out, const CsrMatrix& m) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << m.rows() << ' ' << m.cols() << ' ' << m.nnz() << '\n';
    out << std::setprecision(17);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto cols = m.row_cols(r);
        auto vals = m.row_values(r);
        for (std::size_t p = 0; p < cols.size(); ++p) out << r + 1 << ' ' << cols[p] + 1 << ' ' << vals[p] << '\n';
    }
}

}  // namespace ismnet
