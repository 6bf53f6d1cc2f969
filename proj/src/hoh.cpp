#include "ismnet/hoh.hpp"

#include <cmath>

#include "ismnet/error.hpp"

namespace ismnet {

std::vector<double> hub_degrees(const CsrMatrix& incidence) { return incidence.row_sums(); }

std::vector<double> fringe_degrees(const CsrMatrix& incidence) { return incidence.col_sums(); }

HoHOperator hoh_adjacency(const CsrMatrix& incidence, int hub_order, int fringe_order) {
    HoHOperator op;
    op.hub_order = hub_order;
    op.fringe_order = fringe_order;
    op.hub_degrees = hub_degrees(incidence);
    op.fringe_degrees = fringe_degrees(incidence);

    auto inv_sqrt = [](double d) { return d > 0.0 ? 1.0 / std::sqrt(d) : 0.0; };
    std::vector<double> left(op.hub_degrees.size());
    std::vector<double> right(op.fringe_degrees.size());
    for (std::size_t i = 0; i < left.size(); ++i) left[i] = inv_sqrt(op.hub_degrees[i]);
    for (std::size_t j = 0; j < right.size(); ++j) right[j] = inv_sqrt(op.fringe_degrees[j]);

    const CsrMatrix s = incidence.scaled(left, right);
    // Gustavson accumulates (i,j) and (j,i) from the same products in the
    // same order, so the result is exactly symmetric.
    op.adjacency = multiply(s, s.transposed());
    return op;
}

HoHOperator hoh_adjacency(const SimplicialComplex& complex, int hub_order, int fringe_order) {
    return hoh_adjacency(incidence_matrix(complex, hub_order, fringe_order), hub_order, fringe_order);
}

CsrMatrix hoh_laplacian(const HoHOperator& op) {
    return add(CsrMatrix::identity(op.adjacency.rows()), op.adjacency, 1.0, -1.0);
}

std::vector<DenseMatrix> chebyshev_apply(const CsrMatrix& a, const DenseMatrix& x, int k) {
    if (k < 0) throw DimensionError("chebyshev_apply: K must be non-negative");
    if (a.rows() != a.cols() || a.cols() != x.rows())
        throw DimensionError("chebyshev_apply: operator is " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()) + " but signal has " + std::to_string(x.rows()) + " rows");
    std::vector<DenseMatrix> terms;
    terms.reserve(static_cast<std::size_t>(k) + 1);
    terms.push_back(x);
    if (k >= 1) terms.push_back(multiply(a, x));
    for (int i = 2; i <= k; ++i) {
        DenseMatrix next = multiply(a, terms[i - 1]);
        auto nd = next.data();
        auto prev = terms[i - 2].data();
        for (std::size_t e = 0; e < nd.size(); ++e) nd[e] = 2.0 * nd[e] - prev[e];
        terms.push_back(std::move(next));
    }
    return terms;
}

std::shared_ptr<const HoHOperator> OperatorCache::get(int hub_order, int fringe_order) {
    std::lock_guard lock(mutex_);
    auto& slot = cache_[{hub_order, fringe_order}];
    if (!slot) slot = std::make_shared<const HoHOperator>(hoh_adjacency(*complex_, hub_order, fringe_order));
    return slot;
}

}  // namespace ismnet
