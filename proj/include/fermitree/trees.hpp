/// @file trees.hpp
/// @brief Labeled-tree combinatorics: enumeration, rooting, momentum
///        conservation on rooted trees, interpolation matrices s^T = a*a,
///        and tree-class predicates.

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace fermitree {
namespace trees {

/// Labeled tree on vertices {1..m}; edges stored as sorted (lo, hi) pairs,
/// the list itself sorted lexicographically.
struct Tree {
    int m = 0;
    std::vector<std::pair<int, int>> edges;

    Tree() = default;
    Tree(int m_, std::vector<std::pair<int, int>> edges_);

    int degree(int vertex) const;  // 1-based
    bool operator==(const Tree&) const = default;
};

/// Rooted view of a tree: predecessor map Pi, child lists, and for each
/// edge {l, Pi(l)} the subtree o(l) of vertices separated from the root.
/// All lines are oriented towards the root (the paper's sign convention).
struct RootedTree {
    Tree base;
    int root = 0;
    std::vector<int> pi;                     // pi[l] = predecessor, pi[root] = 0
    std::vector<std::vector<int>> children;  // increasing vertex label
    std::vector<std::uint32_t> subtree;      // subtree[l] = vertex bitmask of o({l,pi(l)})
    std::vector<int> degree;                 // degree[l] = d^T(l)
    std::vector<int> postorder;              // children before parents, root last

    int vertex_count() const { return base.m; }
};

/// All labeled trees on m vertices via Pruefer decoding; 2 <= m <= 8.
std::vector<Tree> enumerate_trees(int m);

/// Decode one Pruefer sequence (length m-2, entries in 1..m).
Tree pruefer_decode(int m, const std::vector<int>& seq);

RootedTree root_tree(const Tree& t, int root);

/// Unique solution of the per-vertex momentum deltas: for each non-root
/// vertex l, the momentum on line {l, Pi(l)} is the sum of all external leg
/// momenta attached below that line, mod the lattice. Momenta are integer
/// vectors mod dims. Returns nullopt when the total momentum is nonzero
/// (every delta is then unsatisfiable and the amplitude kernel vanishes).
std::optional<std::vector<std::vector<int>>> momentum_assignment(
    const RootedTree& rt, const std::vector<std::vector<std::vector<int>>>& leg_momenta,
    const std::vector<int>& dims);

/// Interpolation matrix s^T(l,l') = min of s over the T path between l, l'.
struct STMatrix {
    Eigen::MatrixXd matrix;
    std::vector<double> s_values;  // one per edge, in Tree::edges order
};

/// Builds s^T and verifies positive semidefiniteness (eigenvalues >= -1e-10).
/// Throws on s values outside [0,1].
STMatrix s_matrix(const Tree& t, const std::vector<double>& s);

/// Symmetric PSD square root a with a*a = s^T and unit row norms.
Eigen::MatrixXd factor_a(const STMatrix& st);

/// Branch count sum_l [d^T(l)-2] v 0; the tree class T_{m,b} is the set
/// of trees with branch_excess <= b.
int branch_excess(const Tree& t);

/// The caterpillar tree T_m on {1..2m+2} with edges {l,l+1}, l=1..m+1,
/// and {l,l+m+1}, l=2..m+1 (a spine with one pendant leaf per inner vertex).
Tree caterpillar(int m);

}  // namespace trees
}  // namespace fermitree
