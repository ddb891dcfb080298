#include "coopreg/graph.hpp"

#include <Eigen/Eigenvalues>

#include <limits>
#include <sstream>

namespace coopreg::graph {

DirectedGraph DirectedGraph::build(int n_followers, int n_informed,
                                   const std::vector<Edge>& edges) {
    if (n_followers < 1)
        raise(Errc::invalid_graph, "n_followers must be positive");
    if (n_informed < 1 || n_informed > n_followers)
        raise(Errc::invalid_graph, "n_informed must satisfy 1 <= M <= N");

    Eigen::MatrixXd adjacency = Eigen::MatrixXd::Zero(n_followers, n_followers);
    for (const Edge& e : edges) {
        if (e.from < 1 || e.from > n_followers || e.to < 1 || e.to > n_followers) {
            std::ostringstream msg;
            msg << "edge (" << e.from << " -> " << e.to << ") out of 1.." << n_followers;
            raise(Errc::index_out_of_range, msg.str());
        }
        if (e.from == e.to) {
            std::ostringstream msg;
            msg << "self-loop at node " << e.from;
            raise(Errc::self_loop, msg.str());
        }
        if (e.to <= n_informed) {
            std::ostringstream msg;
            msg << "edge (" << e.from << " -> " << e.to << ") enters informed follower " << e.to;
            raise(Errc::edge_into_informed, msg.str());
        }
        if (!(e.weight > 0.0)) {
            std::ostringstream msg;
            msg << "edge (" << e.from << " -> " << e.to << ") has non-positive weight " << e.weight;
            raise(Errc::invalid_graph, msg.str());
        }
        adjacency(e.to - 1, e.from - 1) = e.weight;
    }
    return DirectedGraph(n_followers, n_informed, std::move(adjacency));
}

LaplacianPartition laplacian_partition(const DirectedGraph& g) {
    const int n = g.n_followers();
    const int m = g.n_informed();
    const Eigen::MatrixXd& a = g.adjacency();

    Eigen::MatrixXd full = -a;
    for (int i = 0; i < n; ++i) full(i, i) = a.row(i).sum();

    LaplacianPartition p;
    p.full = std::move(full);
    p.l1 = p.full.block(m, m, n - m, n - m);
    p.l2 = p.full.block(m, 0, n - m, m);
    return p;
}

bool check_assumption1(const DirectedGraph& g) {
    const int n = g.n_followers();
    const int m = g.n_informed();
    const Eigen::MatrixXd& a = g.adjacency();

    std::vector<bool> reached(n, false);
    std::vector<int> stack;
    for (int i = 0; i < m; ++i) {
        reached[i] = true;
        stack.push_back(i);
    }
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        for (int w = 0; w < n; ++w) {
            if (!reached[w] && a(w, u) > 0.0) {
                reached[w] = true;
                stack.push_back(w);
            }
        }
    }
    for (int i = m; i < n; ++i)
        if (!reached[i]) return false;
    return true;
}

bool check_assumption6(const DirectedGraph& g) {
    if (!check_assumption1(g)) return false;
    const int n = g.n_followers();
    const int m = g.n_informed();
    const Eigen::MatrixXd& a = g.adjacency();
    for (int i = m; i < n; ++i)
        for (int j = m; j < n; ++j)
            if (a(i, j) != a(j, i)) return false;
    return true;
}

DiagonalScaling diagonal_scaling(const LaplacianPartition& p) {
    const Eigen::Index k = p.l1.rows();
    DiagonalScaling out;
    if (k == 0) {
        // All followers informed: nothing to scale.
        out.q = Eigen::VectorXd(0);
        out.lambda0 = std::numeric_limits<double>::infinity();
        return out;
    }

    Eigen::FullPivLU<Eigen::MatrixXd> lu(p.l1.transpose());
    lu.setThreshold(1e-12);
    if (!lu.isInvertible())
        raise(Errc::singular_l1, "l1 is singular; the graph cannot satisfy the reachability assumption");
    out.q = lu.solve(Eigen::VectorXd::Ones(k));

    if ((out.q.array() <= 0.0).any())
        raise(Errc::non_positive_scaling, "scaling vector q has a non-positive entry");

    const Eigen::MatrixXd sym = out.q.asDiagonal() * p.l1 + p.l1.transpose() * out.q.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    out.lambda0 = es.eigenvalues().minCoeff();
    if (!(out.lambda0 > 1e-10))
        raise(Errc::non_positive_scaling, "diag(q) l1 + l1' diag(q) is not positive definite");
    return out;
}

} // namespace coopreg::graph
