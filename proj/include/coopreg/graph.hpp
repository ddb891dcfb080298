#pragma once

#include <Eigen/Dense>

#include <vector>

#include "coopreg/errors.hpp"

namespace coopreg::graph {

// Directed edge: information flows from `from` to `to` (adjacency a_{to,from}).
struct Edge {
    int from = 0;
    int to = 0;
    double weight = 1.0;
};

// Follower communication topology. Followers are indexed 1..N; the first M
// are informed (they receive the exosystem output directly and have no
// incoming edges). Immutable after construction.
class DirectedGraph {
public:
    static DirectedGraph build(int n_followers, int n_informed, const std::vector<Edge>& edges);

    int n_followers() const { return n_followers_; }
    int n_informed() const { return n_informed_; }
    int n_uninformed() const { return n_followers_ - n_informed_; }
    const Eigen::MatrixXd& adjacency() const { return adjacency_; }
    bool is_informed(int node) const { return node >= 1 && node <= n_informed_; }

private:
    DirectedGraph(int n_followers, int n_informed, Eigen::MatrixXd adjacency)
        : n_followers_(n_followers), n_informed_(n_informed), adjacency_(std::move(adjacency)) {}

    int n_followers_;
    int n_informed_;
    Eigen::MatrixXd adjacency_;
};

// Laplacian L with zero top rows for the informed block:
//   L = [ 0_{MxM}  0_{Mx(N-M)} ]
//       [ l2       l1          ]
struct LaplacianPartition {
    Eigen::MatrixXd full; // N x N
    Eigen::MatrixXd l1;   // (N-M) x (N-M)
    Eigen::MatrixXd l2;   // (N-M) x M
};

LaplacianPartition laplacian_partition(const DirectedGraph& g);

// True iff every uninformed follower is reachable from some informed follower
// along the direction of information flow.
bool check_assumption1(const DirectedGraph& g);

// True iff check_assumption1 holds and the uninformed subgraph is undirected
// (a_ij = a_ji for all uninformed i, j).
bool check_assumption6(const DirectedGraph& g);

// M-matrix diagonal scaling: q solves l1' q = 1 with q > 0, and lambda0 is
// the smallest eigenvalue of diag(q) l1 + l1' diag(q), certified positive.
struct DiagonalScaling {
    Eigen::VectorXd q;
    double lambda0 = 0.0;
};

DiagonalScaling diagonal_scaling(const LaplacianPartition& p);

} // namespace coopreg::graph
