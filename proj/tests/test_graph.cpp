#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "icefloe/errors.hpp"
#include "icefloe/graph.hpp"
#include "icefloe/rng.hpp"

using namespace icefloe;
using graph::RelationMatrices;

namespace {

Mat mat_from_rows(const std::vector<std::string>& rows) {
    Mat m(int(rows.size()), int(rows.front().size()));
    for (int r = 0; r < m.rows; ++r)
        for (int c = 0; c < m.cols; ++c) m(r, c) = rows[std::size_t(r)][std::size_t(c)] == '1';
    return m;
}

bool exact_equal(const Mat& a, const Mat& b) {
    return a.rows == b.rows && a.cols == b.cols && a.a == b.a;
}

// reference 12-node / 22-edge chain incidence, frozen by hand
const std::vector<std::string> kChain10Sender = {
    "1000000000000000000000",
    "0110000000000000000000",
    "0001100000000000000000",
    "0000011000000000000000",
    "0000000110000000000000",
    "0000000001100000000000",
    "0000000000011000000000",
    "0000000000000110000000",
    "0000000000000001100000",
    "0000000000000000011000",
    "0000000000000000000110",
    "0000000000000000000001",
};
const std::vector<std::string> kChain10Receiver = {
    "0100000000000000000000",
    "1001000000000000000000",
    "0010010000000000000000",
    "0000100100000000000000",
    "0000001001000000000000",
    "0000000010010000000000",
    "0000000000100100000000",
    "0000000000001001000000",
    "0000000000000010010000",
    "0000000000000000100100",
    "0000000000000000001001",
    "0000000000000000000010",
};

// three-node fully bidirectional triangle with interleaved edge labels
const std::vector<std::string> kTriangleSender = {
    "101000",
    "010001",
    "000110",
};
const std::vector<std::string> kTriangleReceiver = {
    "010100",
    "100010",
    "001001",
};
const std::vector<std::string> kTrianglePermutation = {
    "010000",
    "100000",
    "000100",
    "001000",
    "000001",
    "000010",
};

RelationMatrices triangle() {
    RelationMatrices rel;
    rel.n_nodes = 3;
    rel.n_edges = 6;
    rel.sender = mat_from_rows(kTriangleSender);
    rel.receiver = mat_from_rows(kTriangleReceiver);
    return rel;
}

// arbitrary bidirectional graph with shuffled edge labels
RelationMatrices random_bidirectional(Rng& rng) {
    const int n = 2 + int(rng.uniform() * 9);
    std::vector<std::pair<int, int>> directed;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (rng.uniform() < 0.45) {
                directed.emplace_back(a, b);
                directed.emplace_back(b, a);
            }
    if (directed.empty()) {
        directed.emplace_back(0, 1);
        directed.emplace_back(1, 0);
    }
    for (std::size_t i = directed.size(); i > 1; --i) {
        const auto k = std::size_t(rng.uniform() * double(i));
        std::swap(directed[i - 1], directed[k < i ? k : i - 1]);
    }
    RelationMatrices rel;
    rel.n_nodes = n;
    rel.n_edges = int(directed.size());
    rel.sender = Mat(n, rel.n_edges);
    rel.receiver = Mat(n, rel.n_edges);
    for (int e = 0; e < rel.n_edges; ++e) {
        rel.sender(directed[std::size_t(e)].first, e) = 1.0;
        rel.receiver(directed[std::size_t(e)].second, e) = 1.0;
    }
    return rel;
}

}  // namespace

TEST_CASE("single-floe chain: 3 nodes, 4 edges, wall rows sum to 1") {
    const graph::ChainGraph g = graph::build_chain_graph(1);
    CHECK(g.rel.n_nodes == 3);
    CHECK(g.rel.n_edges == 4);
    for (const Mat* m : {&g.rel.sender, &g.rel.receiver}) {
        double first = 0.0, last = 0.0, mid = 0.0;
        for (int e = 0; e < 4; ++e) {
            first += (*m)(0, e);
            mid += (*m)(1, e);
            last += (*m)(2, e);
        }
        CHECK(first == 1.0);
        CHECK(last == 1.0);
        CHECK(mid == 2.0);
    }
    CHECK(graph::validate_relations(g.rel).ok);
}

TEST_CASE("ten-floe chain reproduces the frozen incidence matrices") {
    const graph::ChainGraph g = graph::build_chain_graph(10);
    CHECK(g.rel.n_nodes == 12);
    CHECK(g.rel.n_edges == 22);
    CHECK(exact_equal(g.rel.sender, mat_from_rows(kChain10Sender)));
    CHECK(exact_equal(g.rel.receiver, mat_from_rows(kChain10Receiver)));
}

TEST_CASE("chain permutation maps sender onto receiver by construction") {
    for (int n : {1, 2, 5, 10, 37}) {
        const graph::ChainGraph g = graph::build_chain_graph(n);
        CHECK(exact_equal(matmul(g.rel.sender, g.perm.p), g.rel.receiver));
        CHECK(g.rel.n_edges == 2 * (n + 1));
    }
}

TEST_CASE("triangle example: validates and yields the frozen permutation") {
    const RelationMatrices rel = triangle();
    CHECK(graph::validate_relations(rel).ok);
    const graph::EdgePermutation perm = graph::build_permutation(rel);
    CHECK(exact_equal(perm.p, mat_from_rows(kTrianglePermutation)));
    CHECK(exact_equal(matmul(rel.sender, perm.p), rel.receiver));
}

TEST_CASE("validation reports the first structural defect") {
    RelationMatrices rel = triangle();
    rel.sender(0, 2) = 0.0;  // zero column
    const auto report = graph::validate_relations(rel);
    CHECK_FALSE(report.ok);
    CHECK(report.message.find("column 2") != std::string::npos);

    RelationMatrices self = triangle();
    self.receiver = self.sender;  // every edge now self-loops
    CHECK_FALSE(graph::validate_relations(self).ok);

    RelationMatrices frac = triangle();
    frac.sender(0, 0) = 0.5;
    CHECK_FALSE(graph::validate_relations(frac).ok);
}

TEST_CASE("edge features are receiver minus sender positions") {
    const graph::ChainGraph g = graph::build_chain_graph(1);
    // nodes at 0, 1.5, 3 -> forward edges +1.5, reverses -1.5
    const Vec e = graph::edge_features({0.0, 1.5, 3.0}, g.rel);
    CHECK(e[0] == doctest::Approx(1.5));
    CHECK(e[1] == doctest::Approx(-1.5));
    CHECK(e[2] == doctest::Approx(1.5));
    CHECK(e[3] == doctest::Approx(-1.5));

    const Vec zero = graph::edge_features({2.0, 2.0, 2.0}, g.rel);
    for (double v : zero) CHECK(v == 0.0);
}

TEST_CASE("edge features are antisymmetric under the pairing") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const graph::ChainGraph g = graph::build_chain_graph(1 + int(rng.uniform() * 8));
        Vec pos(std::size_t(g.rel.n_nodes), 0.0);
        for (double& p : pos) p = rng.uniform(-50.0, 50.0);
        const Vec e = graph::edge_features(pos, g.rel);
        for (int k = 0; k < g.rel.n_edges; ++k)
            CHECK(e[std::size_t(k)] ==
                  -e[std::size_t(g.perm.pair_of[std::size_t(k)])]);
    }
}

TEST_CASE("random bidirectional graphs: permutation identities hold elementwise") {
    Rng rng(29);
    for (int trial = 0; trial < 40; ++trial) {
        const RelationMatrices rel = random_bidirectional(rng);
        REQUIRE(graph::validate_relations(rel).ok);
        const graph::EdgePermutation perm = graph::build_permutation(rel);
        CHECK(exact_equal(perm.p, transpose(perm.p)));
        CHECK(exact_equal(matmul(perm.p, perm.p), Mat::identity(rel.n_edges)));
        CHECK(exact_equal(matmul(rel.sender, perm.p), rel.receiver));
    }
}

TEST_CASE("an edge without a reverse cannot be paired") {
    RelationMatrices rel;
    rel.n_nodes = 2;
    rel.n_edges = 1;
    rel.sender = Mat(2, 1);
    rel.receiver = Mat(2, 1);
    rel.sender(0, 0) = 1.0;
    rel.receiver(1, 0) = 1.0;
    CHECK_THROWS_AS(graph::build_permutation(rel), InvalidConfig);
}

TEST_CASE("chain positions embed the wall constants") {
    const Vec p = graph::chain_positions({3.0, 4.0}, 0.0, 50.0);
    CHECK(p == Vec{0.0, 3.0, 4.0, 50.0});
}
