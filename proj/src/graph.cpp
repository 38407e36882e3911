#include "icefloe/graph.hpp"

#include <sstream>

#include "icefloe/errors.hpp"

namespace icefloe::graph {

ChainGraph build_chain_graph(int n_floes) {
    if (n_floes < 1) throw InvalidConfig("build_chain_graph: need at least one floe");
    ChainGraph g;
    g.n_floes = n_floes;
    const int n_nodes = n_floes + 2;
    const int n_edges = 2 * (n_floes + 1);
    g.rel.n_nodes = n_nodes;
    g.rel.n_edges = n_edges;
    g.rel.sender = Mat(n_nodes, n_edges);
    g.rel.receiver = Mat(n_nodes, n_edges);
    g.send_node.resize(std::size_t(n_edges));
    g.recv_node.resize(std::size_t(n_edges));
    for (int p = 0; p <= n_floes; ++p) {
        const int forward = 2 * p, reverse = 2 * p + 1;
        g.send_node[std::size_t(forward)] = p;
        g.recv_node[std::size_t(forward)] = p + 1;
        g.send_node[std::size_t(reverse)] = p + 1;
        g.recv_node[std::size_t(reverse)] = p;
        g.rel.sender(p, forward) = 1.0;
        g.rel.receiver(p + 1, forward) = 1.0;
        g.rel.sender(p + 1, reverse) = 1.0;
        g.rel.receiver(p, reverse) = 1.0;
    }
    g.perm = build_permutation(g.rel);
    return g;
}

std::vector<int> sender_indices(const RelationMatrices& rel) {
    std::vector<int> idx(std::size_t(rel.n_edges), -1);
    for (int e = 0; e < rel.n_edges; ++e)
        for (int n = 0; n < rel.n_nodes; ++n)
            if (rel.sender(n, e) != 0.0) idx[std::size_t(e)] = n;
    return idx;
}

std::vector<int> receiver_indices(const RelationMatrices& rel) {
    std::vector<int> idx(std::size_t(rel.n_edges), -1);
    for (int e = 0; e < rel.n_edges; ++e)
        for (int n = 0; n < rel.n_nodes; ++n)
            if (rel.receiver(n, e) != 0.0) idx[std::size_t(e)] = n;
    return idx;
}

EdgePermutation build_permutation(const RelationMatrices& rel) {
    const std::vector<int> send = sender_indices(rel);
    const std::vector<int> recv = receiver_indices(rel);
    EdgePermutation perm;
    perm.pair_of.assign(std::size_t(rel.n_edges), -1);
    for (int e = 0; e < rel.n_edges; ++e) {
        for (int f = 0; f < rel.n_edges; ++f) {
            if (send[std::size_t(f)] == recv[std::size_t(e)] &&
                recv[std::size_t(f)] == send[std::size_t(e)]) {
                if (perm.pair_of[std::size_t(e)] != -1)
                    throw InvalidConfig("build_permutation: duplicate reverse edge");
                perm.pair_of[std::size_t(e)] = f;
            }
        }
        if (perm.pair_of[std::size_t(e)] == -1)
            throw InvalidConfig("build_permutation: edge without a reverse");
    }
    perm.p = Mat(rel.n_edges, rel.n_edges);
    for (int e = 0; e < rel.n_edges; ++e) perm.p(perm.pair_of[std::size_t(e)], e) = 1.0;
    return perm;
}

ValidationReport validate_relations(const RelationMatrices& rel) {
    auto fail = [](const std::string& msg) { return ValidationReport{false, msg}; };
    if (rel.sender.rows != rel.n_nodes || rel.sender.cols != rel.n_edges ||
        rel.receiver.rows != rel.n_nodes || rel.receiver.cols != rel.n_edges)
        return fail("matrix shapes do not match n_nodes x n_edges");
    for (const Mat* m : {&rel.sender, &rel.receiver})
        for (int r = 0; r < m->rows; ++r)
            for (int c = 0; c < m->cols; ++c)
                if ((*m)(r, c) != 0.0 && (*m)(r, c) != 1.0)
                    return fail("entry (" + std::to_string(r) + "," + std::to_string(c) +
                                ") is not binary");
    for (int e = 0; e < rel.n_edges; ++e) {
        int s_sum = 0, r_sum = 0, s_node = -1, r_node = -1;
        for (int n = 0; n < rel.n_nodes; ++n) {
            if (rel.sender(n, e) != 0.0) { ++s_sum; s_node = n; }
            if (rel.receiver(n, e) != 0.0) { ++r_sum; r_node = n; }
        }
        if (s_sum != 1)
            return fail("sender column " + std::to_string(e) + " sums to " + std::to_string(s_sum));
        if (r_sum != 1)
            return fail("receiver column " + std::to_string(e) + " sums to " +
                        std::to_string(r_sum));
        if (s_node == r_node)
            return fail("edge " + std::to_string(e) + " has identical sender and receiver");
    }
    return {};
}

Vec edge_features(const Vec& node_positions, const RelationMatrices& rel) {
    if (int(node_positions.size()) != rel.n_nodes)
        throw DimensionMismatch("edge_features: one position per node required");
    const std::vector<int> send = sender_indices(rel);
    const std::vector<int> recv = receiver_indices(rel);
    Vec e(std::size_t(rel.n_edges));
    for (int k = 0; k < rel.n_edges; ++k)
        e[std::size_t(k)] = node_positions[std::size_t(recv[std::size_t(k)])] -
                            node_positions[std::size_t(send[std::size_t(k)])];
    return e;
}

Vec chain_positions(const Vec& floe_positions, double domain_left, double domain_right) {
    Vec p;
    p.reserve(floe_positions.size() + 2);
    p.push_back(domain_left);
    p.insert(p.end(), floe_positions.begin(), floe_positions.end());
    p.push_back(domain_right);
    return p;
}

namespace {

std::string node_label(int n, int n_nodes) {
    if (n == 0) return "left boundary";
    if (n == n_nodes - 1) return "right boundary";
    return "x_" + std::to_string(n);
}

void format_matrix(std::ostringstream& out, const Mat& m, int n_nodes) {
    for (int r = 0; r < m.rows; ++r) {
        std::string label = node_label(r, n_nodes);
        label.resize(16, ' ');
        out << label;
        for (int c = 0; c < m.cols; ++c) out << ' ' << (m(r, c) != 0.0 ? '1' : '0');
        out << '\n';
    }
}

}  // namespace

std::string format_relations(const RelationMatrices& rel) {
    std::ostringstream out;
    std::string header(16, ' ');
    out << header;
    for (int e = 1; e <= rel.n_edges; ++e) out << " e" << e % 10;
    out << "\nR_s =\n";
    format_matrix(out, rel.sender, rel.n_nodes);
    out << "R_r =\n";
    format_matrix(out, rel.receiver, rel.n_nodes);
    return out.str();
}

std::string format_permutation(const EdgePermutation& perm) {
    std::ostringstream out;
    out << "P =\n";
    for (int r = 0; r < perm.p.rows; ++r) {
        for (int c = 0; c < perm.p.cols; ++c)
            out << (c ? " " : "") << (perm.p(r, c) != 0.0 ? '1' : '0');
        out << '\n';
    }
    return out.str();
}

}  // namespace icefloe::graph
