#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

#include "treelearn/correlation.hpp"
#include "treelearn/errors.hpp"
#include "treelearn/quartet.hpp"
#include "treelearn/tree.hpp"

namespace treelearn {

struct IsingThresholds {
    double t1, t2;
};

// t1 = (1-2q_max)^2 rho_min^4, t2 = min{t1, t1 (1-2q_max) / rho_max}.
inline IsingThresholds thresholds_ising(double rho_min, double rho_max, double q_max) {
    if (!(rho_min > 0.0 && rho_min <= rho_max && rho_max < 1.0))
        throw DomainError("thresholds_ising: need 0 < rho_min <= rho_max < 1");
    if (!(q_max >= 0.0 && q_max < 0.5))
        throw DomainError("thresholds_ising: need 0 <= q_max < 0.5");
    const double a = 1.0 - 2.0 * q_max;
    const double t1 = a * a * rho_min * rho_min * rho_min * rho_min;
    const double t2 = std::min(t1, t1 * a / rho_max);
    return {t1, t2};
}

struct GaussianThresholds {
    double h1, h2;
};

// h1 = rho_min^4 / (1+S_max), h2 = min{h1, h1 / (rho_max sqrt(1+S_max))}.
inline GaussianThresholds thresholds_gaussian(double rho_min, double rho_max, double s_max) {
    if (!(rho_min > 0.0 && rho_min <= rho_max && rho_max < 1.0))
        throw DomainError("thresholds_gaussian: need 0 < rho_min <= rho_max < 1");
    if (!(s_max >= 0.0)) throw DomainError("thresholds_gaussian: need S_max >= 0");
    const double h1 = rho_min * rho_min * rho_min * rho_min / (1.0 + s_max);
    const double h2 = std::min(h1, h1 / (rho_max * std::sqrt(1.0 + s_max)));
    return {h1, h2};
}

enum class ModelKind { ising, gaussian };

struct RecoveryConfig {
    double rho_min = 0.0;
    double rho_max = 0.0;
    double noise_bound = 0.0; // q_max for Ising, S_max for Gaussian
    QuartetClassifier classifier = QuartetClassifier::sga;
    ModelKind model_kind = ModelKind::ising;
    std::optional<double> proximal_threshold; // overrides t2 / h2

    double threshold() const {
        if (proximal_threshold) return *proximal_threshold;
        return model_kind == ModelKind::ising
                   ? thresholds_ising(rho_min, rho_max, noise_bound).t2
                   : thresholds_gaussian(rho_min, rho_max, noise_bound).h2;
    }
    double alpha() const { return quartet_alpha(rho_max); }

    // Correlation attenuation one extra noisy node can cost relative to a
    // proximal pair; used by the assembly's relaxed quartet admission.
    double node_attenuation() const {
        return model_kind == ModelKind::ising ? 1.0 - 2.0 * noise_bound
                                              : 1.0 / std::sqrt(1.0 + noise_bound);
    }
};

using ClassifyFn = std::function<QuartetVerdict(const CorrelationMatrix&, double)>;

inline ClassifyFn classifier_fn(QuartetClassifier which) {
    if (which == QuartetClassifier::ka)
        return [](const CorrelationMatrix& c, double a) { return classify_ka(c, a); };
    return [](const CorrelationMatrix& c, double a) { return classify_sga(c, a); };
}

// N(i) = { j != i : |c_ij| >= 0.5 * threshold }.
inline std::vector<std::set<int>> proximal_sets(const CorrelationMatrix& c, double threshold) {
    if (!(threshold > 0.0)) throw DomainError("proximal_sets: threshold must be > 0");
    const int d = c.dim();
    std::vector<std::set<int>> n(d + 1);
    for (int i = 1; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j)
            if (std::abs(c(i, j)) >= 0.5 * threshold) {
                n[i].insert(j);
                n[j].insert(i);
            }
    return n;
}

struct ClusterView {
    std::vector<std::set<int>> clusters;
    std::vector<int> representatives; // one per cluster, same order
    std::vector<Edge> rep_tree;       // filled by assemble_tree
};

namespace detail {

// Verdict on a 4-set of global nodes: sides[0] holds the pair containing the
// smallest id. Caches by node-id key so repeated lookups are cheap.
struct GlobalVerdict {
    bool usable = false; // false when a correlation sits under the guard
    bool star = false;
    std::array<std::array<int, 2>, 2> sides{};
    double margin = 0.0;

    bool separates(int i, int j) const {
        if (star || !usable) return false;
        const bool i0 = i == sides[0][0] || i == sides[0][1];
        const bool j0 = j == sides[0][0] || j == sides[0][1];
        return i0 != j0;
    }
    bool pairs_together(int i, int j) const {
        if (star || !usable) return false;
        const bool i0 = i == sides[0][0] || i == sides[0][1];
        const bool j0 = j == sides[0][0] || j == sides[0][1];
        return i0 == j0;
    }
};

class QuartetOracle {
public:
    QuartetOracle(const CorrelationMatrix& c, double alpha, const ClassifyFn& classify)
        : c_(c), alpha_(alpha), classify_(classify) {}

    const GlobalVerdict& verdict(std::array<int, 4> nodes) {
        std::sort(nodes.begin(), nodes.end());
        const std::uint64_t key = ((std::uint64_t)nodes[0] << 48) | ((std::uint64_t)nodes[1] << 32) |
                                  ((std::uint64_t)nodes[2] << 16) | (std::uint64_t)nodes[3];
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;

        GlobalVerdict out;
        CorrelationMatrix sub(4);
        bool guarded = true;
        for (int a = 0; a < 4 && guarded; ++a)
            for (int b = a + 1; b < 4; ++b) {
                const double v = c_(nodes[a], nodes[b]);
                if (std::abs(v) < kQuartetDenominatorEps) {
                    guarded = false;
                    break;
                }
                sub.set(a + 1, b + 1, v);
            }
        if (guarded) {
            const QuartetVerdict v = classify_(sub, alpha_);
            out.usable = true;
            out.star = v.star;
            out.margin = v.margin;
            if (!v.star) {
                int mate = v.pairing == QuartetPairing::p12_34 ? 1
                         : v.pairing == QuartetPairing::p13_24 ? 2
                                                               : 3;
                out.sides[0] = {nodes[0], nodes[mate]};
                int k = 0;
                for (int a = 1; a < 4; ++a)
                    if (a != mate) out.sides[1][k++] = nodes[a];
            }
        }
        return cache_.emplace(key, out).first->second;
    }

private:
    const CorrelationMatrix& c_;
    double alpha_;
    const ClassifyFn& classify_;
    std::unordered_map<std::uint64_t, GlobalVerdict> cache_;
};

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[b] = a;
        return true;
    }
};

} // namespace detail

// Cluster detection: a proximal pair {i,j} is SEPARATED when some quartet
// {i,j,k,l} with all six pairs mutually proximal classifies as non-star with
// a pairing that splits i from j. Clusters are the connected components of
// the proximal-and-never-separated graph; the representative of a cluster is
// the member with the largest total proximal correlation mass.
inline ClusterView detect_clusters(const CorrelationMatrix& c, const RecoveryConfig& cfg,
                                   const ClassifyFn& classify) {
    const int d = c.dim();
    const auto prox = proximal_sets(c, cfg.threshold());
    detail::QuartetOracle oracle(c, cfg.alpha(), classify);

    auto mutually_proximal = [&](int a, int b) { return prox[a].count(b) > 0; };

    std::vector<std::vector<char>> together(d + 1, std::vector<char>(d + 1, 0));
    for (int i = 1; i <= d; ++i)
        for (int j : prox[i]) {
            if (j <= i) continue;
            bool separated = false;
            for (int k = 1; k <= d && !separated; ++k) {
                if (k == i || k == j || !mutually_proximal(i, k) || !mutually_proximal(j, k))
                    continue;
                for (int l = k + 1; l <= d && !separated; ++l) {
                    if (l == i || l == j) continue;
                    if (!mutually_proximal(i, l) || !mutually_proximal(j, l) ||
                        !mutually_proximal(k, l))
                        continue;
                    const auto& v = oracle.verdict({i, j, k, l});
                    if (v.separates(i, j)) separated = true;
                }
            }
            if (!separated) together[i][j] = together[j][i] = 1;
        }

    detail::UnionFind uf(d + 1);
    for (int i = 1; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j)
            if (together[i][j]) uf.unite(i, j);

    std::vector<double> mass(d + 1, 0.0);
    for (int i = 1; i <= d; ++i)
        for (int j : prox[i]) mass[i] += std::abs(c(i, j));

    ClusterView view;
    std::vector<int> root_to_cluster(d + 1, -1);
    for (int i = 1; i <= d; ++i) {
        const int r = uf.find(i);
        if (root_to_cluster[r] < 0) {
            root_to_cluster[r] = static_cast<int>(view.clusters.size());
            view.clusters.emplace_back();
            view.representatives.push_back(i);
        }
        const int ci = root_to_cluster[r];
        view.clusters[ci].insert(i);
        // Ascending scan + strict inequality = lowest-index tie break.
        if (mass[i] > mass[view.representatives[ci]]) view.representatives[ci] = i;
    }
    return view;
}

// Tree assembly over cluster representatives.
//
// Two representatives are adjacent in the cluster tree exactly when no third
// representative lies between them. "z between x,y" is decided by quartet
// certificates: z is NOT between x and y iff some quartet {x,y,z,w} whose six
// correlations all clear the (attenuation-relaxed) admission threshold
// classifies as non-star pairing {x,y} against {z,w}. Such a witness exists
// for every off-path z (its own cluster or its far-side branch supplies w),
// while no tree edge can pair {x,y} against an on-path z, so at exact noisy
// correlations the certificate count is zero exactly for cluster-tree edges.
// The rep tree is completed by Kruskal over (count asc, |c| desc), and the
// remaining cluster members attach to their representative as leaves.
inline TreeStructure assemble_tree(ClusterView& view, const CorrelationMatrix& c,
                                   const RecoveryConfig& cfg, const ClassifyFn& classify) {
    const int d = c.dim();
    const auto& reps = view.representatives;
    const int k = static_cast<int>(reps.size());
    detail::QuartetOracle oracle(c, cfg.alpha(), classify);

    const double base = 0.5 * cfg.threshold();
    const double attn = cfg.node_attenuation();
    // Relative to a proximal pair, a candidate z costs at most one extra
    // noise factor plus one edge (a representative may be a leaf member of
    // an interior cluster); its witness costs one more noise factor and up
    // to two further edges.
    const double tau_z = base * attn * cfg.rho_min;
    const double tau_q = std::max(base * attn * attn * cfg.rho_min * cfg.rho_min * cfg.rho_min,
                                  kQuartetDenominatorEps);

    auto admissible = [&](std::array<int, 4> q) {
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                if (std::abs(c(q[a], q[b])) < tau_q) return false;
        return true;
    };

    struct Candidate {
        int between_count;
        double weight; // |c(x,y)|
        int x, y;      // rep indices in `reps`
    };
    std::vector<Candidate> candidates;
    for (int xi = 0; xi < k; ++xi)
        for (int yi = xi + 1; yi < k; ++yi) {
            const int x = reps[xi], y = reps[yi];
            int count = 0;
            for (int zi = 0; zi < k; ++zi) {
                const int z = reps[zi];
                if (z == x || z == y) continue;
                if (std::abs(c(x, z)) < tau_z || std::abs(c(y, z)) < tau_z) continue;
                bool certificate = false;
                for (int w = 1; w <= d && !certificate; ++w) {
                    if (w == x || w == y || w == z) continue;
                    std::array<int, 4> q{x, y, z, w};
                    if (!admissible(q)) continue;
                    if (oracle.verdict(q).pairs_together(x, y)) certificate = true;
                }
                if (!certificate) ++count;
            }
            candidates.push_back({count, std::abs(c(x, y)), xi, yi});
        }
    std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
        if (a.between_count != b.between_count) return a.between_count < b.between_count;
        if (a.weight != b.weight) return a.weight > b.weight;
        return std::tie(a.x, a.y) < std::tie(b.x, b.y);
    });

    view.rep_tree.clear();
    detail::UnionFind uf(k);
    for (const auto& cand : candidates) {
        if (static_cast<int>(view.rep_tree.size()) == k - 1) break;
        if (uf.unite(cand.x, cand.y))
            view.rep_tree.push_back(make_edge(reps[cand.x], reps[cand.y]));
    }
    if (static_cast<int>(view.rep_tree.size()) != k - 1)
        throw AssemblyAmbiguous("assemble_tree: representatives could not be spanned");

    std::vector<Edge> edges = view.rep_tree;
    for (std::size_t ci = 0; ci < view.clusters.size(); ++ci)
        for (int member : view.clusters[ci])
            if (member != reps[ci]) edges.push_back(make_edge(member, reps[ci]));
    return TreeStructure(d, std::move(edges));
}

inline TreeStructure recover_with(const CorrelationMatrix& c, const RecoveryConfig& cfg,
                                  const ClassifyFn& classify) {
    if (c.dim() < 3) throw DomainError("recover: need d >= 3");
    ClusterView view = detect_clusters(c, cfg, classify);
    return assemble_tree(view, c, cfg, classify);
}

inline TreeStructure recover(const CorrelationMatrix& c, const RecoveryConfig& cfg) {
    return recover_with(c, cfg, classifier_fn(cfg.classifier));
}

// Chow-Liu: maximum-weight spanning tree on |c_ij|. For zero-field Ising and
// zero-mean Gaussian models the mutual information is increasing in |rho|,
// so this is the classical empirical-MI tree. Ties break lexicographically.
inline TreeStructure chow_liu(const CorrelationMatrix& c) {
    const int d = c.dim();
    if (d < 2) throw DomainError("chow_liu: need d >= 2");
    struct W {
        double weight;
        int i, j;
    };
    std::vector<W> order;
    order.reserve(static_cast<std::size_t>(d) * (d - 1) / 2);
    for (int i = 1; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j) order.push_back({std::abs(c(i, j)), i, j});
    std::sort(order.begin(), order.end(), [](const W& a, const W& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        return std::tie(a.i, a.j) < std::tie(b.i, b.j);
    });
    std::vector<Edge> edges;
    detail::UnionFind uf(d + 1);
    for (const auto& w : order) {
        if (static_cast<int>(edges.size()) == d - 1) break;
        if (uf.unite(w.i, w.j)) edges.push_back(make_edge(w.i, w.j));
    }
    return TreeStructure(d, std::move(edges));
}

} // namespace treelearn
