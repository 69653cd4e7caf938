#include "fermitree/trees.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace fermitree {
namespace trees {

Tree::Tree(int m_, std::vector<std::pair<int, int>> edges_) : m(m_), edges(std::move(edges_)) {
    for (auto& [a, b] : edges) {
        if (a > b) std::swap(a, b);
        if (a < 1 || b > m || a == b) throw std::invalid_argument("Tree: bad edge");
    }
    std::sort(edges.begin(), edges.end());
    if (static_cast<int>(edges.size()) != m - 1) throw std::invalid_argument("Tree: |edges| != m-1");
    // connectivity check
    std::vector<int> comp(m + 1);
    std::iota(comp.begin(), comp.end(), 0);
    auto find = [&](int x) {
        while (comp[x] != x) x = comp[x] = comp[comp[x]];
        return x;
    };
    for (auto [a, b] : edges) {
        int ra = find(a), rb = find(b);
        if (ra == rb) throw std::invalid_argument("Tree: cycle");
        comp[ra] = rb;
    }
}

int Tree::degree(int vertex) const {
    int d = 0;
    for (auto [a, b] : edges) d += (a == vertex) + (b == vertex);
    return d;
}

Tree pruefer_decode(int m, const std::vector<int>& seq) {
    std::vector<int> deg(m + 1, 1);
    for (int v : seq) deg[v]++;
    std::priority_queue<int, std::vector<int>, std::greater<int>> leaves;
    for (int v = 1; v <= m; ++v)
        if (deg[v] == 1) leaves.push(v);
    std::vector<std::pair<int, int>> edges;
    for (int v : seq) {
        int leaf = leaves.top();
        leaves.pop();
        edges.emplace_back(std::min(leaf, v), std::max(leaf, v));
        if (--deg[v] == 1) leaves.push(v);
    }
    int u = leaves.top();
    leaves.pop();
    int w = leaves.top();
    edges.emplace_back(std::min(u, w), std::max(u, w));
    return Tree(m, std::move(edges));
}

std::vector<Tree> enumerate_trees(int m) {
    if (m < 2 || m > 8) throw std::invalid_argument("enumerate_trees: m out of range [2,8]");
    std::vector<Tree> out;
    std::vector<int> seq(m - 2, 1);
    while (true) {
        out.push_back(pruefer_decode(m, seq));
        int i = static_cast<int>(seq.size()) - 1;
        while (i >= 0 && seq[i] == m) seq[i--] = 1;
        if (i < 0) break;
        seq[i]++;
    }
    return out;
}

RootedTree root_tree(const Tree& t, int root) {
    if (root < 1 || root > t.m) throw std::invalid_argument("root_tree: invalid root");
    RootedTree rt;
    rt.base = t;
    rt.root = root;
    rt.pi.assign(t.m + 1, 0);
    rt.children.assign(t.m + 1, {});
    rt.subtree.assign(t.m + 1, 0);
    rt.degree.assign(t.m + 1, 0);
    for (int v = 1; v <= t.m; ++v) rt.degree[v] = t.degree(v);

    std::vector<std::vector<int>> adj(t.m + 1);
    for (auto [a, b] : t.edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::vector<int> order;
    std::vector<bool> seen(t.m + 1, false);
    order.push_back(root);
    seen[root] = true;
    for (std::size_t i = 0; i < order.size(); ++i) {
        int v = order[i];
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = true;
                rt.pi[w] = v;
                order.push_back(w);
            }
    }
    for (int v = 1; v <= t.m; ++v)
        if (v != root) rt.children[rt.pi[v]].push_back(v);
    for (auto& c : rt.children) std::sort(c.begin(), c.end());

    // reverse BFS order visits children before parents
    rt.postorder.assign(order.rbegin(), order.rend());
    for (int v : rt.postorder) {
        if (v == root) continue;
        rt.subtree[v] |= std::uint32_t{1} << (v - 1);
        for (int c : rt.children[v]) rt.subtree[v] |= rt.subtree[c];
    }
    return rt;
}

std::optional<std::vector<std::vector<int>>> momentum_assignment(
    const RootedTree& rt, const std::vector<std::vector<std::vector<int>>>& leg_momenta,
    const std::vector<int>& dims) {
    const int m = rt.vertex_count();
    const int D = static_cast<int>(dims.size());
    auto reduce = [&](std::vector<int>& p) {
        for (int c = 0; c < D; ++c) p[c] = ((p[c] % dims[c]) + dims[c]) % dims[c];
    };
    std::vector<int> total(D, 0);
    for (int l = 1; l <= m; ++l)
        for (const auto& p : leg_momenta[l])
            for (int c = 0; c < D; ++c) total[c] += p[c];
    reduce(total);
    if (std::any_of(total.begin(), total.end(), [](int x) { return x != 0; })) return std::nullopt;

    // line momentum on {l, pi(l)} = sum of leg momenta over the subtree o
    std::vector<std::vector<int>> line(m + 1, std::vector<int>(D, 0));
    for (int v : rt.postorder) {
        if (v == rt.root) continue;
        for (const auto& p : leg_momenta[v])
            for (int c = 0; c < D; ++c) line[v][c] += p[c];
        for (int ch : rt.children[v])
            for (int c = 0; c < D; ++c) line[v][c] += line[ch][c];
    }
    for (int v = 1; v <= m; ++v) reduce(line[v]);
    return line;
}

STMatrix s_matrix(const Tree& t, const std::vector<double>& s) {
    if (s.size() != t.edges.size()) throw std::invalid_argument("s_matrix: wrong edge count");
    for (double v : s)
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("s_matrix: s outside [0,1]");
    const int m = t.m;
    // min over the path: Floyd-Warshall style max-min closure works, but for
    // m <= 8 a BFS per vertex is simplest.
    std::vector<std::vector<std::pair<int, double>>> adj(m + 1);
    for (std::size_t e = 0; e < t.edges.size(); ++e) {
        auto [a, b] = t.edges[e];
        adj[a].emplace_back(b, s[e]);
        adj[b].emplace_back(a, s[e]);
    }
    Eigen::MatrixXd st = Eigen::MatrixXd::Zero(m, m);
    for (int v = 1; v <= m; ++v) {
        std::vector<double> best(m + 1, -1.0);
        best[v] = 1.0;
        std::vector<int> stack{v};
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (auto [w, sv] : adj[u])
                if (best[w] < 0.0) {
                    best[w] = std::min(best[u], sv);
                    stack.push_back(w);
                }
        }
        for (int w = 1; w <= m; ++w) st(v - 1, w - 1) = best[w];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(st, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw std::runtime_error("s_matrix: min-over-path matrix not PSD");
    return {st, s};
}

Eigen::MatrixXd factor_a(const STMatrix& st) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(st.matrix);
    if (es.eigenvalues().minCoeff() < -1e-10) throw std::invalid_argument("factor_a: not PSD");
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

int branch_excess(const Tree& t) {
    int b = 0;
    for (int v = 1; v <= t.m; ++v) b += std::max(t.degree(v) - 2, 0);
    return b;
}

Tree caterpillar(int m) {
    if (m < 1) throw std::invalid_argument("caterpillar: m < 1");
    std::vector<std::pair<int, int>> edges;
    for (int l = 1; l <= m + 1; ++l) edges.emplace_back(l, l + 1);
    for (int l = 2; l <= m + 1; ++l) edges.emplace_back(l, l + m + 1);
    return Tree(2 * m + 2, std::move(edges));
}

}  // namespace trees
}  // namespace fermitree
