#include "ismnet/complex.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "ismnet/error.hpp"

namespace ismnet {

namespace {

bool strictly_ascending(std::span<const NodeId> v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i - 1] >= v[i]) return false;
    return true;
}

// Collects rows of fixed width, deduplicating in batches so memory stays
// near the size of the unique set.
class LayerAccumulator {
public:
    LayerAccumulator(int order, std::size_t cap) : order_(order), width_(order + 1), cap_(cap) {}

    void add(std::span<const NodeId> row) {
        flat_.insert(flat_.end(), row.begin(), row.end());
        if (rows() - unique_rows_ > std::max<std::size_t>(std::size_t{1} << 20, unique_rows_)) compact();
    }

    SimplexLayer finish() {
        compact();
        return SimplexLayer(order_, std::move(flat_));
    }

private:
    std::size_t rows() const { return flat_.size() / width_; }

    void compact() {
        const std::size_t n = rows();
        std::vector<std::uint32_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0u);
        auto row = [&](std::uint32_t i) { return std::span<const NodeId>(flat_.data() + i * width_, width_); };
        std::sort(idx.begin(), idx.end(), [&](std::uint32_t a, std::uint32_t b) {
            auto ra = row(a), rb = row(b);
            return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
        });
        std::vector<NodeId> out;
        out.reserve(flat_.size());
        std::size_t kept = 0;
        for (std::size_t k = 0; k < n; ++k) {
            auto r = row(idx[k]);
            if (kept > 0 && std::equal(r.begin(), r.end(), out.end() - static_cast<std::ptrdiff_t>(width_))) continue;
            out.insert(out.end(), r.begin(), r.end());
            ++kept;
        }
        flat_ = std::move(out);
        unique_rows_ = kept;
        if (kept > cap_) throw CapExceededError(order_, kept, cap_);
    }

    int order_;
    std::size_t width_;
    std::size_t cap_;
    std::size_t unique_rows_ = 0;
    std::vector<NodeId> flat_;
};

// Calls emit(subset) for every k-subset of `set` (lexicographic order).
template <typename Fn>
void for_each_subset(std::span<const NodeId> set, std::size_t k, Fn&& emit) {
    const std::size_t n = set.size();
    if (k == 0 || k > n) return;
    std::vector<std::size_t> pos(k);
    std::iota(pos.begin(), pos.end(), 0);
    std::vector<NodeId> buf(k);
    while (true) {
        for (std::size_t i = 0; i < k; ++i) buf[i] = set[pos[i]];
        emit(std::span<const NodeId>(buf));
        std::size_t i = k;
        while (i > 0 && pos[i - 1] == n - k + (i - 1)) --i;
        if (i == 0) return;
        ++pos[i - 1];
        for (std::size_t j = i; j < k; ++j) pos[j] = pos[j - 1] + 1;
    }
}

SimplexLayer node_layer(std::size_t n) {
    std::vector<NodeId> flat(n);
    std::iota(flat.begin(), flat.end(), NodeId{0});
    return SimplexLayer(0, std::move(flat));
}

std::vector<std::vector<NodeId>> adjacency_lists(const SimplicialComplex& cx) {
    std::vector<std::vector<NodeId>> adj(cx.node_count());
    const auto& edges = cx.layer(1);
    for (SimplexId e = 0; e < edges.size(); ++e) {
        auto uv = edges[e];
        adj[uv[0]].push_back(uv[1]);
        adj[uv[1]].push_back(uv[0]);
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());
    return adj;
}

std::vector<NodeId> intersect(std::span<const NodeId> a, std::span<const NodeId> b) {
    std::vector<NodeId> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

// Matula-Beck smallest-last ordering; ties by node id.
std::vector<NodeId> degeneracy_order(const std::vector<std::vector<NodeId>>& adj) {
    const std::size_t n = adj.size();
    std::vector<std::size_t> deg(n);
    std::size_t max_deg = 0;
    for (std::size_t v = 0; v < n; ++v) max_deg = std::max(max_deg, deg[v] = adj[v].size());
    std::vector<std::vector<NodeId>> buckets(max_deg + 1);
    for (std::size_t v = n; v-- > 0;) buckets[deg[v]].push_back(static_cast<NodeId>(v));
    std::vector<std::uint8_t> removed(n, 0);
    std::vector<NodeId> order;
    order.reserve(n);
    std::size_t d = 0;
    while (order.size() < n) {
        d = 0;
        while (buckets[d].empty()) ++d;
        const NodeId v = buckets[d].back();
        buckets[d].pop_back();
        if (removed[v] || deg[v] != d) continue;
        removed[v] = 1;
        order.push_back(v);
        for (auto u : adj[v]) {
            if (removed[u]) continue;
            --deg[u];
            buckets[deg[u]].push_back(u);
        }
    }
    return order;
}

class BronKerbosch {
public:
    explicit BronKerbosch(const std::vector<std::vector<NodeId>>& adj) : adj_(adj) {}

    template <typename Fn>
    void run(Fn&& report) {
        const auto order = degeneracy_order(adj_);
        std::vector<std::size_t> rank(adj_.size());
        for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;
        std::vector<NodeId> r;
        for (auto v : order) {
            std::vector<NodeId> p, x;
            for (auto u : adj_[v]) (rank[u] > rank[v] ? p : x).push_back(u);
            r.assign(1, v);
            expand(r, std::move(p), std::move(x), report);
        }
    }

private:
    template <typename Fn>
    void expand(std::vector<NodeId>& r, std::vector<NodeId> p, std::vector<NodeId> x, Fn& report) {
        if (p.empty()) {
            if (x.empty()) report(r);
            return;
        }
        // Tomita pivot: the vertex of P u X with most neighbours in P.
        NodeId pivot = p.front();
        std::size_t best = 0;
        for (const auto* set : {&p, &x}) {
            for (auto u : *set) {
                const auto c = intersect(adj_[u], p).size();
                if (c > best || (c == best && u < pivot)) {
                    best = c;
                    pivot = u;
                }
            }
        }
        std::vector<NodeId> candidates;
        std::set_difference(p.begin(), p.end(), adj_[pivot].begin(), adj_[pivot].end(),
                            std::back_inserter(candidates));
        for (auto v : candidates) {
            r.push_back(v);
            expand(r, intersect(p, adj_[v]), intersect(x, adj_[v]), report);
            r.pop_back();
            p.erase(std::lower_bound(p.begin(), p.end(), v));
            x.insert(std::lower_bound(x.begin(), x.end(), v), v);
        }
    }

    const std::vector<std::vector<NodeId>>& adj_;
};

}  // namespace

// --- Simplex ---------------------------------------------------------------

Simplex::Simplex(std::vector<NodeId> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.empty()) throw std::invalid_argument("simplex must have at least one vertex");
    if (!strictly_ascending(vertices_)) throw std::invalid_argument("simplex vertices must be strictly ascending");
}

Simplex Simplex::from_unsorted(std::vector<NodeId> vertices) {
    std::sort(vertices.begin(), vertices.end());
    return Simplex(std::move(vertices));
}

// --- SimplexLayer ----------------------------------------------------------

SimplexLayer::SimplexLayer(int order, std::vector<NodeId> flat) : order_(order), flat_(std::move(flat)) {
    if (order < 0) throw std::invalid_argument("negative simplex order");
    if (flat_.size() % width() != 0) throw std::invalid_argument("layer storage not a multiple of width");
    for (std::size_t i = 0; i < size(); ++i) {
        auto r = (*this)[static_cast<SimplexId>(i)];
        if (!strictly_ascending(r)) throw std::invalid_argument("layer row not strictly ascending");
        if (i > 0) {
            auto prev = (*this)[static_cast<SimplexId>(i - 1)];
            if (!std::lexicographical_compare(prev.begin(), prev.end(), r.begin(), r.end()))
                throw std::invalid_argument("layer rows not sorted and unique");
        }
    }
}

std::optional<SimplexId> SimplexLayer::find(std::span<const NodeId> vertices) const {
    if (vertices.size() != width()) return std::nullopt;
    std::size_t lo = 0, hi = size();
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        auto row = (*this)[static_cast<SimplexId>(mid)];
        if (std::lexicographical_compare(row.begin(), row.end(), vertices.begin(), vertices.end()))
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < size()) {
        auto row = (*this)[static_cast<SimplexId>(lo)];
        if (std::equal(row.begin(), row.end(), vertices.begin())) return static_cast<SimplexId>(lo);
    }
    return std::nullopt;
}

// --- SimplicialComplex -----------------------------------------------------

SimplicialComplex::SimplicialComplex(std::vector<NodeLabel> labels, std::vector<SimplexLayer> layers)
    : labels_(std::move(labels)), layers_(std::move(layers)) {
    if (layers_.empty()) layers_.push_back(node_layer(labels_.size()));
    for (std::size_t h = 0; h < layers_.size(); ++h)
        if (layers_[h].order() != static_cast<int>(h)) throw std::invalid_argument("layer order mismatch");
    if (layers_[0].size() != labels_.size()) throw std::invalid_argument("node layer does not match label count");
    for (const auto& layer : layers_)
        for (auto v : layer.flat())
            if (v >= labels_.size()) throw std::invalid_argument("simplex references unknown node");
    if (!is_downward_closed()) throw std::invalid_argument("complex is not downward closed");
}

const SimplexLayer& SimplicialComplex::layer(int order) const {
    if (!has_layer(order)) throw MissingLayerError(order);
    return layers_[static_cast<std::size_t>(order)];
}

std::optional<SimplexId> SimplicialComplex::find(const Simplex& s) const {
    if (!has_layer(s.order())) return std::nullopt;
    return layers_[static_cast<std::size_t>(s.order())].find(s.vertices());
}

Simplex SimplicialComplex::simplex(int order, SimplexId id) const {
    auto v = layer(order)[id];
    return Simplex(std::vector<NodeId>(v.begin(), v.end()));
}

bool SimplicialComplex::is_downward_closed() const {
    std::vector<NodeId> face;
    for (std::size_t h = 1; h < layers_.size(); ++h) {
        const auto& layer = layers_[h];
        const auto& below = layers_[h - 1];
        for (SimplexId id = 0; id < layer.size(); ++id) {
            auto s = layer[id];
            for (std::size_t skip = 0; skip < s.size(); ++skip) {
                face.clear();
                for (std::size_t i = 0; i < s.size(); ++i)
                    if (i != skip) face.push_back(s[i]);
                if (!below.find(face)) return false;
            }
        }
    }
    return true;
}

std::uint64_t SimplicialComplex::content_hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xffu;
            h *= 1099511628211ull;
        }
    };
    mix(labels_.size());
    for (auto l : labels_) mix(l);
    mix(layers_.size());
    for (const auto& layer : layers_) {
        mix(layer.size());
        for (auto v : layer.flat()) mix(v);
    }
    return h;
}

// --- builders --------------------------------------------------------------

SimplicialComplex from_edge_list(std::span<const std::pair<NodeLabel, NodeLabel>> edges) {
    std::vector<NodeLabel> labels;
    labels.reserve(edges.size() * 2);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].first == edges[i].second) throw ParseError(i, "self-loop on node " + std::to_string(edges[i].first));
        labels.push_back(edges[i].first);
        labels.push_back(edges[i].second);
    }
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    auto dense = [&](NodeLabel l) {
        return static_cast<NodeId>(std::lower_bound(labels.begin(), labels.end(), l) - labels.begin());
    };
    std::vector<std::pair<NodeId, NodeId>> pairs;
    pairs.reserve(edges.size());
    for (const auto& [a, b] : edges) {
        const auto u = dense(a), v = dense(b);
        pairs.emplace_back(std::min(u, v), std::max(u, v));
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    std::vector<NodeId> flat;
    flat.reserve(pairs.size() * 2);
    for (const auto& [u, v] : pairs) {
        flat.push_back(u);
        flat.push_back(v);
    }
    const auto n = labels.size();
    std::vector<SimplexLayer> layers;
    layers.push_back(node_layer(n));
    layers.emplace_back(1, std::move(flat));
    return SimplicialComplex(std::move(labels), std::move(layers));
}

std::vector<std::vector<NodeId>> maximal_cliques(const SimplicialComplex& complex) {
    const auto adj = adjacency_lists(complex);
    std::vector<std::vector<NodeId>> cliques;
    BronKerbosch(adj).run([&](const std::vector<NodeId>& r) {
        auto c = r;
        std::sort(c.begin(), c.end());
        cliques.push_back(std::move(c));
    });
    std::sort(cliques.begin(), cliques.end());
    return cliques;
}

SimplicialComplex clique_lift(const SimplicialComplex& complex, int max_order, std::size_t cap) {
    if (max_order < 1) throw std::invalid_argument("clique_lift requires max_order >= 1");
    complex.layer(1);  // must exist
    const auto adj = adjacency_lists(complex);

    std::vector<LayerAccumulator> acc;
    for (int h = 1; h <= max_order; ++h) acc.emplace_back(h, cap);

    BronKerbosch(adj).run([&](const std::vector<NodeId>& r) {
        std::vector<NodeId> clique = r;
        std::sort(clique.begin(), clique.end());
        const std::size_t top = std::min<std::size_t>(clique.size(), static_cast<std::size_t>(max_order) + 1);
        for (std::size_t k = 2; k <= top; ++k)
            for_each_subset(clique, k, [&](std::span<const NodeId> s) { acc[k - 2].add(s); });
    });

    std::vector<SimplexLayer> layers;
    layers.push_back(node_layer(complex.node_count()));
    for (auto& a : acc) layers.push_back(a.finish());
    std::vector<NodeLabel> labels(complex.labels().begin(), complex.labels().end());
    return SimplicialComplex(std::move(labels), std::move(layers));
}

SimplexListResult from_simplex_list(std::span<const SimplexRecord> records, std::size_t cap) {
    std::vector<NodeLabel> labels;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].vertices.empty()) throw ParseError(i, "record has no vertices");
        if (!(records[i].weight >= 0.0)) throw ParseError(i, "record weight must be non-negative");
        labels.insert(labels.end(), records[i].vertices.begin(), records[i].vertices.end());
    }
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    auto dense = [&](NodeLabel l) {
        return static_cast<NodeId>(std::lower_bound(labels.begin(), labels.end(), l) - labels.begin());
    };

    SimplexListResult result;
    std::map<std::vector<NodeId>, double> merged;
    for (const auto& rec : records) {
        std::vector<NodeId> v;
        v.reserve(rec.vertices.size());
        for (auto l : rec.vertices) v.push_back(dense(l));
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        auto [it, inserted] = merged.try_emplace(std::move(v), 0.0);
        if (!inserted) ++result.duplicate_records;
        it->second += rec.weight;
    }

    std::size_t top = 1;
    for (const auto& [v, w] : merged) top = std::max(top, v.size());
    const int max_order = static_cast<int>(top) - 1;

    std::vector<LayerAccumulator> acc;
    for (int h = 1; h <= max_order; ++h) acc.emplace_back(h, cap);
    for (const auto& [v, w] : merged)
        for (std::size_t k = 2; k <= v.size(); ++k)
            for_each_subset(v, k, [&](std::span<const NodeId> s) { acc[k - 2].add(s); });

    std::vector<SimplexLayer> layers;
    layers.push_back(node_layer(labels.size()));
    for (auto& a : acc) layers.push_back(a.finish());
    result.complex = SimplicialComplex(std::move(labels), std::move(layers));

    for (int h = 0; h <= max_order; ++h) result.scores.push_back(InfluenceScores::unobserved(result.complex.count(h)));
    for (const auto& [v, w] : merged) {
        const int h = static_cast<int>(v.size()) - 1;
        const auto id = *result.complex.layer(h).find(v);
        result.scores[static_cast<std::size_t>(h)].values[id] = w;
        result.scores[static_cast<std::size_t>(h)].observed[id] = 1;
    }
    return result;
}

// --- incidence -------------------------------------------------------------

CsrMatrix incidence_matrix(const SimplicialComplex& complex, int h, int f) {
    const auto& hub = complex.layer(h);
    const auto& fringe = complex.layer(f);
    if (h == f) throw std::invalid_argument("incidence_matrix requires distinct orders");
    if (h > f) return incidence_matrix(complex, f, h).transposed();

    // h < f: each f-simplex contributes its (h+1)-subsets.
    std::vector<Triplet> entries;
    for (SimplexId j = 0; j < fringe.size(); ++j) {
        for_each_subset(fringe[j], static_cast<std::size_t>(h) + 1, [&](std::span<const NodeId> s) {
            if (auto i = hub.find(s)) entries.push_back({*i, j, 1.0});
        });
    }
    return CsrMatrix::from_triplets(hub.size(), fringe.size(), std::move(entries));
}

std::vector<std::int64_t> generalized_degree(const SimplicialComplex& complex, int d, int m) {
    const auto b = incidence_matrix(complex, m, d);
    std::vector<std::int64_t> k(b.rows());
    for (std::size_t r = 0; r < b.rows(); ++r) k[r] = static_cast<std::int64_t>(b.row_cols(r).size());
    return k;
}

}  // namespace ismnet
