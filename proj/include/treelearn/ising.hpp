#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <vector>

#include "treelearn/correlation.hpp"
#include "treelearn/errors.hpp"
#include "treelearn/tree.hpp"

namespace treelearn {

// theta = atanh(rho) = 0.5 ln((1+rho)/(1-rho)).
inline double theta_from_rho(double rho) {
    if (!(std::abs(rho) < 1.0)) throw DomainError("theta_from_rho: |rho| must be < 1");
    return 0.5 * std::log((1.0 + rho) / (1.0 - rho));
}

// Zero-field Ising tree: uniform marginals, one correlation per edge.
class IsingTreeModel {
public:
    IsingTreeModel(TreeStructure tree, std::map<Edge, double> edge_corr,
                   std::optional<CorrelationBounds> bounds = std::nullopt,
                   bool allow_unit_correlation = false)
        : tree_(std::move(tree)), edge_corr_(std::move(edge_corr)) {
        const double cap = allow_unit_correlation ? 1.0 : std::nextafter(1.0, 0.0);
        for (const auto& e : tree_.edges()) {
            auto it = edge_corr_.find(e);
            if (it == edge_corr_.end())
                throw InvalidShape("IsingTreeModel: missing correlation for an edge");
            const double a = std::abs(it->second);
            if (a == 0.0 || a > cap)
                throw DomainError("IsingTreeModel: edge correlation must be in (-1,1) \\ {0}");
            if (bounds && (a < bounds->rho_min || a > bounds->rho_max))
                throw DomainError("IsingTreeModel: |rho_e| violates declared P2 bounds");
        }
        if (edge_corr_.size() != tree_.edges().size())
            throw InvalidShape("IsingTreeModel: correlation given for a non-edge");
    }

    const TreeStructure& tree() const { return tree_; }
    double edge_correlation(int i, int j) const { return edge_corr_.at(make_edge(i, j)); }
    const std::map<Edge, double>& edge_correlations() const { return edge_corr_; }

private:
    TreeStructure tree_;
    std::map<Edge, double> edge_corr_;
};

// Per-node sign-flip probabilities. Entries outside [0, q_max] only arise in
// test overrides; P3 is enforced when a bound is declared.
class IsingNoiseSpec {
public:
    explicit IsingNoiseSpec(std::vector<double> q, std::optional<double> q_max = std::nullopt)
        : q_(std::move(q)) {
        for (double qi : q_) {
            if (!(qi >= 0.0 && qi <= 1.0)) throw DomainError("IsingNoiseSpec: q_i outside [0, 1]");
            if (q_max && qi > *q_max) throw DomainError("IsingNoiseSpec: q_i exceeds declared q_max");
        }
        if (q_max && !(*q_max < 0.5)) throw DomainError("IsingNoiseSpec: q_max must be < 0.5");
    }

    static IsingNoiseSpec noiseless(int d) { return IsingNoiseSpec(std::vector<double>(d, 0.0)); }

    int dim() const { return static_cast<int>(q_.size()); }
    double q(int node) const { return q_[node - 1]; }
    const std::vector<double>& values() const { return q_; }

private:
    std::vector<double> q_;
};

// Correlation decay on trees: rho_{i,j} is the product of edge correlations
// along the unique i-j path.
inline CorrelationMatrix exact_correlations(const IsingTreeModel& m) {
    const int d = m.tree().node_count();
    CorrelationMatrix c(d);
    std::vector<int> order, parent;
    for (int root = 1; root <= d; ++root) {
        m.tree().bfs_order(root, order, parent);
        std::vector<double> prod(d + 1, 1.0);
        for (std::size_t k = 1; k < order.size(); ++k) {
            int v = order[k];
            prod[v] = prod[parent[v]] * m.edge_correlation(parent[v], v);
            if (v > root) c.set(root, v, prod[v]);
        }
    }
    return c;
}

// rho~_{i,j} = (1-2q_i)(1-2q_j) rho_{i,j}.
inline CorrelationMatrix noisy_correlations(const CorrelationMatrix& clean,
                                            const IsingNoiseSpec& noise) {
    const int d = clean.dim();
    if (noise.dim() != d) throw DimensionMismatch("noisy_correlations: dimension mismatch");
    CorrelationMatrix out(d);
    for (int i = 1; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j)
            out.set(i, j, (1.0 - 2.0 * noise.q(i)) * (1.0 - 2.0 * noise.q(j)) * clean(i, j));
    return out;
}

// Explicit joint over {+1,-1}^d, indexed by bitmask (bit i-1 set <=> x_i = -1).
// Root-uniform factorization with P(child == parent) = (1 + rho_e)/2.
inline std::vector<double> joint_distribution(const IsingTreeModel& m) {
    const int d = m.tree().node_count();
    if (d > 16) throw SizeGuard("joint_distribution: d > 16");
    std::vector<int> order, parent;
    m.tree().bfs_order(1, order, parent);
    const std::size_t n_states = std::size_t{1} << d;
    std::vector<double> p(n_states, 0.0);
    for (std::size_t s = 0; s < n_states; ++s) {
        double prob = 0.5;
        for (std::size_t k = 1; k < order.size(); ++k) {
            const int v = order[k];
            const int u = parent[v];
            const bool same = ((s >> (v - 1)) & 1) == ((s >> (u - 1)) & 1);
            const double rho = m.edge_correlation(u, v);
            prob *= same ? 0.5 * (1.0 + rho) : 0.5 * (1.0 - rho);
        }
        p[s] = prob;
    }
    return p;
}

// Push a joint through the independent per-node sign-flip channel.
inline std::vector<double> noisy_joint_distribution(const std::vector<double>& p,
                                                    const IsingNoiseSpec& noise) {
    const int d = noise.dim();
    if (p.size() != (std::size_t{1} << d))
        throw SizeGuard("noisy_joint_distribution: joint size must be 2^d with d <= 16");
    if (d > 16) throw SizeGuard("noisy_joint_distribution: d > 16");
    std::vector<double> cur = p, next(p.size());
    for (int i = 1; i <= d; ++i) {
        const double q = noise.q(i);
        if (q == 0.0) continue;
        const std::size_t bit = std::size_t{1} << (i - 1);
        for (std::size_t s = 0; s < cur.size(); ++s)
            next[s] = (1.0 - q) * cur[s] + q * cur[s ^ bit];
        cur.swap(next);
    }
    return cur;
}

// Pairwise expectations E[x_i x_j] of an explicit joint (test oracle helper).
inline CorrelationMatrix correlations_of_joint(const std::vector<double>& p, int d) {
    CorrelationMatrix c(d);
    for (int i = 1; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j) {
            double e = 0.0;
            const std::size_t bi = std::size_t{1} << (i - 1);
            const std::size_t bj = std::size_t{1} << (j - 1);
            for (std::size_t s = 0; s < p.size(); ++s) {
                const bool same = ((s & bi) != 0) == ((s & bj) != 0);
                e += same ? p[s] : -p[s];
            }
            c.set(i, j, std::max(-1.0, std::min(1.0, e)));
        }
    return c;
}

// ---------- model file format ----------
// Tree file lines followed by one "i j rho" line per edge (writer sorts
// edges lexicographically). Noise spec: one q_i per line.

inline void write_ising_model(std::ostream& os, const IsingTreeModel& m) {
    write_tree(os, m.tree());
    const auto old_precision = os.precision(17);
    for (const auto& [e, rho] : m.edge_correlations())
        os << e.first << " " << e.second << " " << rho << "\n";
    os.precision(old_precision);
}

inline IsingTreeModel read_ising_model(std::istream& is) {
    TreeStructure t = read_tree(is);
    std::map<Edge, double> corr;
    for (std::size_t k = 0; k < t.edges().size(); ++k) {
        int i = 0, j = 0;
        double rho = 0.0;
        if (!(is >> i >> j >> rho)) throw IoError("read_ising_model: missing correlation line");
        corr[make_edge(i, j)] = rho;
    }
    return IsingTreeModel(std::move(t), std::move(corr));
}

inline void write_noise(std::ostream& os, const std::vector<double>& values) {
    const auto old_precision = os.precision(17);
    for (double v : values) os << v << "\n";
    os.precision(old_precision);
}

inline std::vector<double> read_noise(std::istream& is, int d) {
    std::vector<double> values(d);
    for (double& v : values)
        if (!(is >> v)) throw IoError("read_noise: missing entry");
    return values;
}

} // namespace treelearn
