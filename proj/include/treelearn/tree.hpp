#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "treelearn/errors.hpp"
#include "treelearn/rng.hpp"

namespace treelearn {

using Edge = std::pair<int, int>; // unordered pair, stored with first < second

inline Edge make_edge(int i, int j) {
    return i < j ? Edge{i, j} : Edge{j, i};
}

// Labeled tree on nodes 1..d. Connectivity and acyclicity are checked at
// construction; edges are kept normalized (i < j) and lexicographically sorted.
class TreeStructure {
public:
    TreeStructure(int d, std::vector<Edge> edges) : d_(d) {
        if (d < 1) throw InvalidShape("TreeStructure: node count must be >= 1");
        if (static_cast<int>(edges.size()) != d - 1)
            throw InvalidShape("TreeStructure: a tree on d nodes has d-1 edges");
        for (auto& e : edges) {
            if (e.first == e.second) throw InvalidShape("TreeStructure: self-loop");
            e = make_edge(e.first, e.second);
            if (e.first < 1 || e.second > d)
                throw InvalidShape("TreeStructure: node label out of 1..d");
        }
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
            throw InvalidShape("TreeStructure: duplicate edge");
        edges_ = std::move(edges);
        adj_.assign(d + 1, {});
        for (const auto& [i, j] : edges_) {
            adj_[i].push_back(j);
            adj_[j].push_back(i);
        }
        // d-1 edges + connected => acyclic.
        std::vector<char> seen(d + 1, 0);
        std::vector<int> stack{1};
        seen[1] = 1;
        int found = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : adj_[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    ++found;
                    stack.push_back(v);
                }
        }
        if (found != d) throw InvalidShape("TreeStructure: graph is not connected");
    }

    int node_count() const { return d_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<int>& neighbors(int node) const { return adj_[node]; }
    int degree(int node) const { return static_cast<int>(adj_[node].size()); }

    bool has_edge(int i, int j) const {
        return std::binary_search(edges_.begin(), edges_.end(), make_edge(i, j));
    }

    bool operator==(const TreeStructure& other) const {
        return d_ == other.d_ && edges_ == other.edges_;
    }
    bool operator<(const TreeStructure& other) const {
        return std::tie(d_, edges_) < std::tie(other.d_, other.edges_);
    }

    // Parent array of the tree rooted at `root`, in BFS discovery order.
    // order[0] == root, parent[root] == 0.
    void bfs_order(int root, std::vector<int>& order, std::vector<int>& parent) const {
        order.clear();
        order.reserve(d_);
        parent.assign(d_ + 1, 0);
        std::vector<char> seen(d_ + 1, 0);
        order.push_back(root);
        seen[root] = 1;
        for (std::size_t head = 0; head < order.size(); ++head) {
            int u = order[head];
            for (int v : adj_[u])
                if (!seen[v]) {
                    seen[v] = 1;
                    parent[v] = u;
                    order.push_back(v);
                }
        }
    }

    // Unique path between two nodes, endpoints included.
    std::vector<int> path(int from, int to) const {
        std::vector<int> order, parent;
        bfs_order(from, order, parent);
        std::vector<int> p{to};
        while (p.back() != from) p.push_back(parent[p.back()]);
        std::reverse(p.begin(), p.end());
        return p;
    }

private:
    int d_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> adj_;
};

inline std::set<int> leaves(const TreeStructure& t) {
    std::set<int> out;
    for (int i = 1; i <= t.node_count(); ++i)
        if (t.degree(i) == 1) out.insert(i);
    return out;
}

// Partition of the nodes into equivalence clusters (an internal node plus all
// leaves adjacent to it; leafless internal nodes are singletons), together
// with the tree induced on the clusters by internal-node adjacency.
struct EquivalenceClusterPartition {
    std::vector<std::set<int>> clusters;           // sorted by smallest member
    std::vector<std::pair<int, int>> cluster_tree; // edges as cluster indices
    std::vector<int> cluster_of;                   // node id -> cluster index

    int cluster_index(int node) const { return cluster_of[node]; }
};

inline EquivalenceClusterPartition equivalence_clusters(const TreeStructure& t) {
    const int d = t.node_count();
    if (d < 2) throw InvalidShape("equivalence_clusters: need d >= 2");
    EquivalenceClusterPartition out;
    out.cluster_of.assign(d + 1, -1);
    if (d == 2) {
        // No internal node exists; the two mutually-adjacent leaves form one
        // cluster and every swap is the identity.
        out.clusters.push_back({1, 2});
        out.cluster_of[1] = out.cluster_of[2] = 0;
        return out;
    }
    std::vector<int> anchor(d + 1, 0); // node -> its cluster's internal node
    for (int i = 1; i <= d; ++i)
        anchor[i] = (t.degree(i) == 1) ? t.neighbors(i)[0] : i;
    std::map<int, std::set<int>> by_anchor;
    for (int i = 1; i <= d; ++i) by_anchor[anchor[i]].insert(i);
    // Canonical cluster order: by smallest member, so that equivalent trees
    // (whose partitions agree as sets of sets) get identical indexing.
    std::vector<std::pair<std::set<int>, int>> ordered; // (members, anchor)
    for (const auto& [a, members] : by_anchor) ordered.emplace_back(members, a);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& x, const auto& y) { return *x.first.begin() < *y.first.begin(); });
    std::vector<int> cluster_of_anchor(d + 1, -1);
    for (const auto& [members, a] : ordered) {
        cluster_of_anchor[a] = static_cast<int>(out.clusters.size());
        for (int m : members) out.cluster_of[m] = static_cast<int>(out.clusters.size());
        out.clusters.push_back(members);
    }
    for (const auto& [i, j] : t.edges()) {
        if (t.degree(i) > 1 && t.degree(j) > 1)
            out.cluster_tree.emplace_back(cluster_of_anchor[i], cluster_of_anchor[j]);
    }
    for (auto& e : out.cluster_tree)
        if (e.first > e.second) std::swap(e.first, e.second);
    std::sort(out.cluster_tree.begin(), out.cluster_tree.end());
    return out;
}

// |[T]| = prod over leaf-bearing clusters of (1 + #leaves). A cluster of size
// k holds k-1 leaves around one internal node, so it contributes a factor k,
// except that a 2-node tree has class size 1 (no internal node to swap with).
inline std::uint64_t equivalence_class_size(const TreeStructure& t) {
    const int d = t.node_count();
    if (d < 2) throw InvalidShape("equivalence_class_size: need d >= 2");
    if (d == 2) return 1;
    auto part = equivalence_clusters(t);
    std::uint64_t size = 1;
    for (const auto& c : part.clusters) size *= static_cast<std::uint64_t>(c.size());
    return size;
}

// Relabel a tree by the permutation that swaps each node in `swap_leaves`
// with its unique neighbor. Valid for any S in the paper's family (members
// are leaves with pairwise-distinct neighbors, so the transpositions commute).
inline TreeStructure apply_leaf_swaps(const TreeStructure& t, const std::vector<int>& swap_leaves) {
    const int d = t.node_count();
    std::vector<int> perm(d + 1);
    for (int i = 0; i <= d; ++i) perm[i] = i;
    for (int leaf : swap_leaves) {
        int nb = t.neighbors(leaf)[0];
        std::swap(perm[leaf], perm[nb]);
    }
    std::vector<Edge> edges;
    edges.reserve(t.edges().size());
    for (const auto& [i, j] : t.edges()) edges.push_back(make_edge(perm[i], perm[j]));
    return TreeStructure(d, std::move(edges));
}

// [T] by direct enumeration over S (at most one leaf per cluster).
inline std::set<TreeStructure> enumerate_equivalence_class(const TreeStructure& t) {
    const int d = t.node_count();
    if (d > 16) throw SizeGuard("enumerate_equivalence_class: d > 16");
    std::set<TreeStructure> out;
    if (d < 2) {
        out.insert(t);
        return out;
    }
    auto part = equivalence_clusters(t);
    auto leaf_set = leaves(t);
    // Per cluster: the choice of which leaf to swap up (or none).
    std::vector<std::vector<int>> options; // 0 = no swap, otherwise the leaf id
    for (const auto& c : part.clusters) {
        std::vector<int> opts{0};
        for (int m : c)
            if (leaf_set.count(m)) opts.push_back(m);
        options.push_back(std::move(opts));
    }
    std::vector<std::size_t> pick(options.size(), 0);
    for (;;) {
        std::vector<int> swaps;
        for (std::size_t c = 0; c < options.size(); ++c)
            if (options[c][pick[c]] != 0) swaps.push_back(options[c][pick[c]]);
        out.insert(apply_leaf_swaps(t, swaps));
        std::size_t c = 0;
        while (c < pick.size() && ++pick[c] == options[c].size()) pick[c++] = 0;
        if (c == pick.size()) break;
    }
    return out;
}

// Canonical equivalence test: identical cluster node-partitions and identical
// cluster trees under that shared partition. O(d); cross-checked against
// enumeration in the test suite.
inline bool is_equivalent(const TreeStructure& t1, const TreeStructure& t2) {
    if (t1.node_count() != t2.node_count())
        throw DimensionMismatch("is_equivalent: node counts differ");
    if (t1.node_count() < 2) return true;
    auto p1 = equivalence_clusters(t1);
    auto p2 = equivalence_clusters(t2);
    if (p1.clusters != p2.clusters) return false;
    // Clusters are sorted by smallest member in both partitions, so equal
    // partitions imply index-compatible cluster trees.
    return p1.cluster_tree == p2.cluster_tree;
}

enum class NamedTree { chain, star, hybrid12, gauss_hybrid10 };

inline TreeStructure make_named_tree(NamedTree kind, int d) {
    std::vector<Edge> edges;
    switch (kind) {
    case NamedTree::chain:
        if (d < 2) throw InvalidShape("chain: need d >= 2");
        for (int i = 1; i < d; ++i) edges.emplace_back(i, i + 1);
        break;
    case NamedTree::star:
        if (d < 2) throw InvalidShape("star: need d >= 2");
        for (int j = 2; j <= d; ++j) edges.emplace_back(1, j);
        break;
    case NamedTree::hybrid12:
        // Chain 1..6 with 7..12 attached to node 6.
        if (d != 12) throw InvalidShape("hybrid12: requires d = 12");
        for (int i = 1; i < 6; ++i) edges.emplace_back(i, i + 1);
        for (int j = 7; j <= 12; ++j) edges.emplace_back(6, j);
        break;
    case NamedTree::gauss_hybrid10:
        // Chain 1..5 with 6..10 attached to node 5.
        if (d != 10) throw InvalidShape("gauss_hybrid10: requires d = 10");
        for (int i = 1; i < 5; ++i) edges.emplace_back(i, i + 1);
        for (int j = 6; j <= 10; ++j) edges.emplace_back(5, j);
        break;
    }
    return TreeStructure(d, std::move(edges));
}

// Decode a Prufer sequence (values in 1..d, length d-2) into the unique tree.
inline TreeStructure prufer_decode(int d, const std::vector<int>& seq) {
    if (d == 1) return TreeStructure(1, {});
    if (static_cast<int>(seq.size()) != d - 2)
        throw InvalidShape("prufer_decode: sequence length must be d-2");
    std::vector<int> deg(d + 1, 1);
    for (int v : seq) ++deg[v];
    std::vector<Edge> edges;
    edges.reserve(d - 1);
    std::set<int> leaf_pool;
    for (int i = 1; i <= d; ++i)
        if (deg[i] == 1) leaf_pool.insert(i);
    for (int v : seq) {
        int leaf = *leaf_pool.begin();
        leaf_pool.erase(leaf_pool.begin());
        edges.push_back(make_edge(leaf, v));
        if (--deg[v] == 1) leaf_pool.insert(v);
    }
    int a = *leaf_pool.begin();
    int b = *std::next(leaf_pool.begin());
    edges.push_back(make_edge(a, b));
    return TreeStructure(d, std::move(edges));
}

// Uniform over all d^(d-2) labeled trees.
inline TreeStructure random_tree(int d, RandomStream& rng) {
    if (d < 2) throw InvalidShape("random_tree: need d >= 2");
    std::vector<int> seq(d - 2);
    for (auto& v : seq) v = 1 + static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(d)));
    return prufer_decode(d, seq);
}

// ---------- tree file format ----------
// First line: d. Then one "i j" line per edge, 1-based; writer emits the
// edges in lexicographic order.

inline void write_tree(std::ostream& os, const TreeStructure& t) {
    os << t.node_count() << "\n";
    for (const auto& [i, j] : t.edges()) os << i << " " << j << "\n";
}

inline TreeStructure read_tree(std::istream& is) {
    int d = 0;
    if (!(is >> d)) throw IoError("read_tree: missing node count");
    std::vector<Edge> edges;
    for (int k = 0; k < d - 1; ++k) {
        int i = 0, j = 0;
        if (!(is >> i >> j)) throw IoError("read_tree: missing edge line");
        edges.emplace_back(i, j);
    }
    return TreeStructure(d, std::move(edges));
}

} // namespace treelearn
