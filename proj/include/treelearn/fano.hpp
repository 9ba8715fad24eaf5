#pragma once

#include <cmath>
#include <map>
#include <vector>

#include "treelearn/errors.hpp"
#include "treelearn/ising.hpp"
#include "treelearn/tree.hpp"

namespace treelearn {

// The impossibility family on d = 2t+1 nodes: T_0 is the star on node 2t+1
// with correlation rho_min toward nodes 1..t and rho_max toward t+1..2t;
// T_k rewires the edge {k_a, 2t+1} to {k_a, k_b+t} (correlation rho_min),
// where k_a = 1 + floor((k-1)/t) and k_b = k - (k_a-1) t. Noise q_max sits
// on nodes 1..t only, so every noisy distribution stays tree-Markov.
struct FanoFamily {
    int t = 0;
    double rho_min = 0.0, rho_max = 0.0, q_max = 0.0;
    std::vector<IsingTreeModel> models; // T_0 .. T_M, M = t^2
    IsingNoiseSpec noise{std::vector<double>{}};

    int node_count() const { return 2 * t + 1; }
    int family_size() const { return t * t + 1; } // M + 1
};

inline FanoFamily fano_family(int t, double rho_min, double rho_max, double q_max) {
    if (t < 2) throw DomainError("fano_family: need t >= 2");
    if (2 * t + 1 > 15) throw SizeGuard("fano_family: 2t+1 must be <= 15");
    if (!(rho_min > 0.0 && rho_min <= rho_max && rho_max < 1.0))
        throw DomainError("fano_family: need 0 < rho_min <= rho_max < 1");
    if (!(q_max >= 0.0 && q_max < 0.5)) throw DomainError("fano_family: need 0 <= q_max < 0.5");

    const int d = 2 * t + 1;
    FanoFamily f;
    f.t = t;
    f.rho_min = rho_min;
    f.rho_max = rho_max;
    f.q_max = q_max;

    auto corr_for = [&](int j) { return j <= t ? rho_min : rho_max; };

    std::vector<Edge> base_edges;
    std::map<Edge, double> base_corr;
    for (int j = 1; j <= 2 * t; ++j) {
        base_edges.push_back(make_edge(j, d));
        base_corr[make_edge(j, d)] = corr_for(j);
    }
    f.models.emplace_back(TreeStructure(d, base_edges), base_corr);

    for (int k = 1; k <= t * t; ++k) {
        const int ka = 1 + (k - 1) / t;
        const int kb = k - (ka - 1) * t;
        std::vector<Edge> edges;
        std::map<Edge, double> corr;
        for (int j = 1; j <= 2 * t; ++j) {
            if (j == ka) continue;
            edges.push_back(make_edge(j, d));
            corr[make_edge(j, d)] = corr_for(j);
        }
        edges.push_back(make_edge(ka, kb + t));
        corr[make_edge(ka, kb + t)] = rho_min;
        f.models.emplace_back(TreeStructure(d, std::move(edges)), std::move(corr));
    }

    std::vector<double> q(d, 0.0);
    for (int i = 1; i <= t; ++i) q[i - 1] = q_max;
    f.noise = IsingNoiseSpec(std::move(q));
    return f;
}

struct FanoVerification {
    bool classes_disjoint = false;
    std::vector<double> exact_j;   // J(P~_k, P~_0) for k = 1..M, from 2^d states
    double closed_form_thm = 0.0;  // rho_q = (1-2 q_max) rho_min
    double closed_form_alt = 0.0;  // rho_q = (1-q_max) rho_min
    double max_residual_thm = 0.0;
    double max_residual_alt = 0.0;
    double j_spread = 0.0; // max |J_k - J_1| across k; the closed form has no k

    bool matches_thm(double tol = 1e-9) const { return max_residual_thm <= tol; }
    bool matches_alt(double tol = 1e-9) const { return max_residual_alt <= tol; }
};

// Exact verification of the family: pairwise-disjoint equivalence classes by
// enumeration, and the symmetric KL between each P~_k and P~_0 from explicit
// 2^d-state joints, reported against both candidate closed-form constants.
inline FanoVerification verify_fano_family(const FanoFamily& f) {
    const int d = f.node_count();
    if (d > 15) throw SizeGuard("verify_fano_family: d must be <= 15");

    FanoVerification out;

    std::vector<std::set<TreeStructure>> classes;
    classes.reserve(f.models.size());
    for (const auto& m : f.models) classes.push_back(enumerate_equivalence_class(m.tree()));
    out.classes_disjoint = true;
    for (std::size_t a = 0; a < classes.size() && out.classes_disjoint; ++a)
        for (std::size_t b = a + 1; b < classes.size(); ++b) {
            for (const auto& tree : classes[a])
                if (classes[b].count(tree)) {
                    out.classes_disjoint = false;
                    break;
                }
            if (!out.classes_disjoint) break;
        }

    const auto p0 = noisy_joint_distribution(joint_distribution(f.models[0]), f.noise);
    for (std::size_t k = 1; k < f.models.size(); ++k) {
        const auto pk = noisy_joint_distribution(joint_distribution(f.models[k]), f.noise);
        double j = 0.0;
        for (std::size_t s = 0; s < pk.size(); ++s)
            j += (pk[s] - p0[s]) * (std::log(pk[s]) - std::log(p0[s]));
        out.exact_j.push_back(j);
    }

    auto closed = [&](double rho_q) {
        return 2.0 * std::atanh(rho_q) * rho_q * (1.0 - f.rho_max);
    };
    out.closed_form_thm = closed((1.0 - 2.0 * f.q_max) * f.rho_min);
    out.closed_form_alt = closed((1.0 - f.q_max) * f.rho_min);
    for (double j : out.exact_j) {
        out.max_residual_thm = std::max(out.max_residual_thm, std::abs(j - out.closed_form_thm));
        out.max_residual_alt = std::max(out.max_residual_alt, std::abs(j - out.closed_form_alt));
        out.j_spread = std::max(out.j_spread, std::abs(j - out.exact_j.front()));
    }
    return out;
}

} // namespace treelearn
