#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "ismnet/complex.hpp"
#include "ismnet/sparse.hpp"

namespace ismnet {

/// Higher-order hierarchical operator for one hub/fringe layer pair.
///
/// `adjacency` is the symmetric-normalised two-step walk hub -> fringe -> hub:
///
///     A = D_hub^{-1/2} B D_fringe^{-1} B^T D_hub^{-1/2}
///
/// with 0^{-1/2} = 0^{-1} = 0 for isolated simplices. A = S S^T for
/// S = D_hub^{-1/2} B D_fringe^{-1/2}, so its spectrum lies in [0, 1].
struct HoHOperator {
    int hub_order = -1;
    int fringe_order = -1;
    CsrMatrix adjacency;
    std::vector<double> hub_degrees;
    std::vector<double> fringe_degrees;
};

/// Row sums of an incidence matrix (delta_{h,f}).
std::vector<double> hub_degrees(const CsrMatrix& incidence);
/// Column sums of an incidence matrix (delta_{f,h}).
std::vector<double> fringe_degrees(const CsrMatrix& incidence);

HoHOperator hoh_adjacency(const CsrMatrix& incidence, int hub_order = -1, int fringe_order = -1);
HoHOperator hoh_adjacency(const SimplicialComplex& complex, int hub_order, int fringe_order);

/// L = I - A
CsrMatrix hoh_laplacian(const HoHOperator& op);

/// Chebyshev terms T_0(A)X .. T_K(A)X via the three-term recurrence.
std::vector<DenseMatrix> chebyshev_apply(const CsrMatrix& a, const DenseMatrix& x, int k);

/// Builds each (hub, fringe) operator once per complex and hands out shared
/// immutable copies. Thread-safe.
class OperatorCache {
public:
    explicit OperatorCache(const SimplicialComplex& complex) : complex_(&complex) {}

    std::shared_ptr<const HoHOperator> get(int hub_order, int fringe_order);

private:
    const SimplicialComplex* complex_;
    std::mutex mutex_;
    std::map<std::pair<int, int>, std::shared_ptr<const HoHOperator>> cache_;
};

}  // namespace ismnet
