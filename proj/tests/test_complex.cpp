#include <set>

#include "doctest.h"
#include "ismnet/complex.hpp"
#include "ismnet/error.hpp"
#include "ismnet/io.hpp"
#include "support.hpp"

using namespace ismnet;
using namespace ismnet::testing;

namespace {

using VertexSet = std::vector<NodeId>;

std::set<VertexSet> layer_set(const SimplicialComplex& cx, int h) {
    std::set<VertexSet> out;
    const auto& layer = cx.layer(h);
    for (SimplexId i = 0; i < layer.size(); ++i) out.emplace(layer[i].begin(), layer[i].end());
    return out;
}

// Every vertex subset of size h+1 whose members are pairwise adjacent.
std::set<VertexSet> brute_cliques(const SimplicialComplex& g, int h) {
    const auto n = static_cast<NodeId>(g.node_count());
    const auto edges = layer_set(g, 1);
    std::set<VertexSet> out;
    VertexSet cur;
    auto rec = [&](auto&& self, NodeId start) -> void {
        if (cur.size() == static_cast<std::size_t>(h) + 1) {
            out.insert(cur);
            return;
        }
        for (NodeId v = start; v < n; ++v) {
            bool ok = true;
            for (auto u : cur) ok = ok && edges.count({u, v});
            if (!ok) continue;
            cur.push_back(v);
            self(self, v + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

bool strictly_contains(std::span<const NodeId> big, std::span<const NodeId> small) {
    return big.size() > small.size() && std::includes(big.begin(), big.end(), small.begin(), small.end());
}

}  // namespace

TEST_CASE("from_edge_list") {
    const auto p = graph({{0, 1}, {1, 2}});
    CHECK(p.count(0) == 3);
    CHECK(p.count(1) == 2);
    CHECK(p.max_order() == 1);
    CHECK_THROWS_AS(p.layer(2), MissingLayerError);

    CHECK(graph({{0, 1}, {1, 0}, {0, 1}}).count(1) == 1);

    // Sparse external labels are densified in label order.
    const auto s = graph({{100, 7}, {7, 42}});
    CHECK(s.count(0) == 3);
    CHECK(std::vector<NodeLabel>(s.labels().begin(), s.labels().end()) == std::vector<NodeLabel>{7, 42, 100});
    CHECK(s.find(Simplex({0, 2})).has_value());

    const EdgeList loop{{0, 1}, {1, 2}, {3, 3}};
    try {
        graph(loop);
        FAIL("self-loop accepted");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
}

TEST_CASE("Simplex rejects unsorted or empty vertex lists") {
    CHECK_THROWS(Simplex({}));
    CHECK_THROWS(Simplex({2, 1}));
    CHECK_THROWS(Simplex({1, 1}));
    CHECK(Simplex::from_unsorted({3, 1, 2}).vertices()[0] == 1);
    CHECK_THROWS(Simplex::from_unsorted({3, 1, 3}));
    CHECK(Simplex({4, 9}).order() == 1);
}

TEST_CASE("clique_lift on small complete graphs") {
    CHECK(lifted(complete_edges(3), 2).count(2) == 1);

    const auto k4 = lifted(complete_edges(4), 2);
    CHECK(k4.count(2) == 4);
    CHECK(k4.max_order() == 2);
    CHECK(layer_set(k4, 2) == brute_cliques(graph(complete_edges(4)), 2));

    const auto k5 = lifted(complete_edges(5), 3);
    CHECK(k5.count(3) == 5);
    CHECK(k5.count(2) == 10);
}

TEST_CASE("clique_lift matches brute-force enumeration") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto g = graph(random_edges(18, 0.35, seed));
        const auto cx = clique_lift(g, 4);
        CHECK(cx.is_downward_closed());
        for (int h = 0; h <= 4; ++h) CHECK(layer_set(cx, h) == brute_cliques(g, h));
    }
}

TEST_CASE("clique_lift properties") {
    SUBCASE("idempotent") {
        const auto cx = lifted(random_edges(25, 0.3, 11), 3);
        CHECK(clique_lift(cx, 3) == cx);
    }
    SUBCASE("triangle-free graphs gain nothing") {
        EdgeList bip;
        for (NodeLabel i = 0; i < 4; ++i)
            for (NodeLabel j = 4; j < 8; ++j) bip.emplace_back(i, j);
        const auto cx = lifted(bip, 3);
        CHECK(cx.count(2) == 0);
        CHECK(cx.count(3) == 0);
    }
    SUBCASE("cap guard reports the count") {
        try {
            clique_lift(graph(complete_edges(8)), 3, 30);
            FAIL("cap not enforced");
        } catch (const CapExceededError& e) {
            CHECK(e.count() > 30);
        }
    }
}

TEST_CASE("Les Miserables clique counts") {
    const auto cx = clique_lift(from_edge_list(io::read_edge_list(ISMNET_SOURCE_DIR "/data/lesmis.edges")), 3);
    CHECK(cx.count(0) == 77);
    CHECK(cx.count(1) == 254);
    CHECK(cx.count(2) == 467);
    CHECK(cx.count(3) == 639);
}

TEST_CASE("maximal cliques") {
    const auto g = graph({{0, 1}, {0, 2}, {1, 2}, {2, 3}, {3, 4}});
    const auto mc = maximal_cliques(g);
    CHECK(mc == std::vector<std::vector<NodeId>>{{0, 1, 2}, {2, 3}, {3, 4}});
}

TEST_CASE("from_simplex_list") {
    {
        const std::vector<SimplexRecord> r{{{0, 1, 2}, 5.0}};
        const auto res = from_simplex_list(r);
        CHECK(res.complex.count(0) == 3);
        CHECK(res.complex.count(1) == 3);
        CHECK(res.complex.count(2) == 1);
        CHECK(res.scores[2].is_observed(0));
        CHECK(res.scores[2].values[0] == 5.0);
        CHECK_FALSE(res.scores[1].is_observed(0));
        CHECK(res.duplicate_records == 0);
    }
    {
        const std::vector<SimplexRecord> r{{{0, 1}, 2.0}, {{1, 2}, 3.0}};
        const auto res = from_simplex_list(r);
        CHECK(res.complex.count(1) == 2);
        CHECK(res.complex.max_order() == 1);
    }
    {
        const std::vector<SimplexRecord> r{{{0, 1, 2}, 1.0}, {{2, 0, 1}, 2.0}};
        const auto res = from_simplex_list(r);
        CHECK(res.scores[2].values[0] == 3.0);
        CHECK(res.duplicate_records == 1);
    }
    {
        const std::vector<SimplexRecord> r{{{3, 5, 9, 12}, 1.0}, {{5, 7}, 1.0}};
        const auto cx = from_simplex_list(r).complex;
        CHECK(cx.is_downward_closed());
        CHECK(cx.count(3) == 1);
        CHECK(cx.count(2) == 4);
        CHECK(cx.count(1) == 7);
    }
    CHECK_THROWS(from_simplex_list(std::vector<SimplexRecord>{{{}, 1.0}}));
    CHECK_THROWS(from_simplex_list(std::vector<SimplexRecord>{{{0, 1}, -1.0}}));
}

TEST_CASE("incidence examples") {
    const auto tri = lifted(complete_edges(3), 2);
    const auto b10 = incidence_matrix(tri, 1, 0);
    CHECK(b10.row_sums() == std::vector<double>{2, 2, 2});
    CHECK(incidence_matrix(tri, 2, 1).to_dense() == DenseMatrix(1, 3, 1.0));

    const auto tp = lifted(triangle_pendant_edges(), 2);
    const auto b02 = incidence_matrix(tp, 0, 2);
    CHECK(b02.row_cols(3).empty());
    CHECK_THROWS_AS(incidence_matrix(tp, 0, 3), MissingLayerError);
    CHECK_THROWS(incidence_matrix(tp, 1, 1));
}

TEST_CASE("incidence matches brute-force containment for every order pair") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto cx = lifted(random_edges(14, 0.45, seed), 3);
        for (int h = 0; h <= 3; ++h)
            for (int f = 0; f <= 3; ++f) {
                if (h == f) continue;
                const auto b = incidence_matrix(cx, h, f);
                REQUIRE(b.rows() == cx.count(h));
                REQUIRE(b.cols() == cx.count(f));
                bool ok = true;
                for (SimplexId i = 0; i < cx.count(h); ++i)
                    for (SimplexId j = 0; j < cx.count(f); ++j) {
                        const auto a = cx.layer(h)[i], t = cx.layer(f)[j];
                        const double expected = strictly_contains(a, t) || strictly_contains(t, a) ? 1.0 : 0.0;
                        ok = ok && b.at(i, j) == expected;
                    }
                CHECK(ok);
                CHECK(b == incidence_matrix(cx, f, h).transposed());
            }
    }
}

TEST_CASE("generalized degree") {
    const auto g = graph(random_edges(30, 0.2, 5));
    const auto k10 = generalized_degree(g, 1, 0);
    std::int64_t total = 0;
    for (NodeId v = 0; v < g.count(0); ++v) {
        std::int64_t deg = 0;
        for (SimplexId e = 0; e < g.count(1); ++e) {
            const auto s = g.layer(1)[e];
            deg += s[0] == v || s[1] == v;
        }
        CHECK(k10[v] == deg);
        total += k10[v];
    }
    CHECK(total == 2 * static_cast<std::int64_t>(g.count(1)));

    const auto tri = lifted(complete_edges(3), 2);
    CHECK(generalized_degree(tri, 2, 0) == std::vector<std::int64_t>{1, 1, 1});

    const auto k4 = lifted(complete_edges(4), 2);
    CHECK(generalized_degree(k4, 2, 1) == std::vector<std::int64_t>(6, 2));
}

TEST_CASE("content hash tracks content") {
    const auto a = lifted(complete_edges(4), 2);
    const auto b = lifted(complete_edges(4), 2);
    const auto c = lifted(path_edges(4), 2);
    CHECK(a.content_hash() == b.content_hash());
    CHECK(a.content_hash() != c.content_hash());
}
