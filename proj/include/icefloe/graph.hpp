#pragma once

#include <string>
#include <vector>

#include "icefloe/linalg.hpp"

namespace icefloe::graph {

// Binary sender/receiver incidence of a directed graph: column k of each
// matrix marks the endpoint of edge k.
struct RelationMatrices {
    int n_nodes = 0;
    int n_edges = 0;
    Mat sender;    // n_nodes x n_edges
    Mat receiver;  // n_nodes x n_edges
};

// Column permutation pairing each directed edge with its reverse. Symmetric
// and involutory; maps the sender matrix onto the receiver matrix.
struct EdgePermutation {
    Mat p;                     // n_edges x n_edges
    std::vector<int> pair_of;  // pair_of[k] = index of the reversed edge
};

struct ValidationReport {
    bool ok = true;
    std::string message;
};

// Fixed chain over [left wall, floe 1 .. floe n, right wall]: every adjacent
// node pair carries two directed edges, emitted left to right with the
// forward edge before its reverse. 2*(n_floes+1) edges in total.
struct ChainGraph {
    int n_floes = 0;
    RelationMatrices rel;
    EdgePermutation perm;
    std::vector<int> send_node;  // per edge
    std::vector<int> recv_node;  // per edge
};

ChainGraph build_chain_graph(int n_floes);

// Pairs every edge with its reverse in an arbitrary bidirectional graph.
// Throws InvalidConfig when some edge has no unique reverse.
EdgePermutation build_permutation(const RelationMatrices& rel);

// Checks the structural invariants (binary entries, unit column sums, no
// self-edges). Returns the first violation instead of aborting.
ValidationReport validate_relations(const RelationMatrices& rel);

std::vector<int> sender_indices(const RelationMatrices& rel);
std::vector<int> receiver_indices(const RelationMatrices& rel);

// Per-edge displacement: e[k] = x[receiver(k)] - x[sender(k)].
Vec edge_features(const Vec& node_positions, const RelationMatrices& rel);

// Node position vector for the chain graph: walls at the domain ends.
Vec chain_positions(const Vec& floe_positions, double domain_left, double domain_right);

// Printable table in the incidence layout (rows labelled "left boundary",
// "x_1", ..). Used by the CLI graph subcommand.
std::string format_relations(const RelationMatrices& rel);
std::string format_permutation(const EdgePermutation& perm);

}  // namespace icefloe::graph
