#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <istream>
#include <ostream>
#include <vector>

#include "treelearn/correlation.hpp"
#include "treelearn/errors.hpp"
#include "treelearn/tree.hpp"

namespace treelearn {

// Gaussian tree with precision I + w*A (A = adjacency), per the experiment
// construction: covariance and correlation matrices are precomputed.
class GaussianTreeModel {
public:
    GaussianTreeModel(TreeStructure tree, double w)
        : tree_(std::move(tree)), w_(w), correlation_(tree_.node_count()) {
        const int d = tree_.node_count();
        Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(d, d);
        for (const auto& [i, j] : tree_.edges()) {
            precision(i - 1, j - 1) = w;
            precision(j - 1, i - 1) = w;
        }
        Eigen::LLT<Eigen::MatrixXd> llt(precision);
        if (llt.info() != Eigen::Success)
            throw NotPositiveDefinite("GaussianTreeModel: precision is not positive definite");
        covariance_ = llt.solve(Eigen::MatrixXd::Identity(d, d));
        precision_ = precision;
        for (int i = 1; i <= d; ++i)
            for (int j = i + 1; j <= d; ++j)
                correlation_.set(i, j, covariance_(i - 1, j - 1) /
                                           std::sqrt(covariance_(i - 1, i - 1) *
                                                     covariance_(j - 1, j - 1)));
    }

    const TreeStructure& tree() const { return tree_; }
    double w() const { return w_; }
    const Eigen::MatrixXd& precision() const { return precision_; }
    const Eigen::MatrixXd& covariance() const { return covariance_; }
    const CorrelationMatrix& correlation() const { return correlation_; }

    // min/max |K*_{ij}| over tree edges (the P2 analog read off K*).
    CorrelationBounds edge_correlation_bounds() const {
        double lo = 1.0, hi = 0.0;
        for (const auto& [i, j] : tree_.edges()) {
            const double a = std::abs(correlation_(i, j));
            lo = std::min(lo, a);
            hi = std::max(hi, a);
        }
        return {lo, hi};
    }

private:
    TreeStructure tree_;
    double w_;
    Eigen::MatrixXd precision_;
    Eigen::MatrixXd covariance_;
    CorrelationMatrix correlation_;
};

inline GaussianTreeModel gaussian_model(const TreeStructure& tree, double w) {
    return GaussianTreeModel(tree, w);
}

// Additive noise variances, the diagonal of D*.
class GaussianNoiseSpec {
public:
    explicit GaussianNoiseSpec(std::vector<double> variances) : variances_(std::move(variances)) {
        for (double v : variances_)
            if (!(v >= 0.0)) throw DomainError("GaussianNoiseSpec: variances must be >= 0");
    }

    static GaussianNoiseSpec noiseless(int d) {
        return GaussianNoiseSpec(std::vector<double>(d, 0.0));
    }

    int dim() const { return static_cast<int>(variances_.size()); }
    double variance(int node) const { return variances_[node - 1]; }
    const std::vector<double>& values() const { return variances_; }

    // S_i = sigma_i^2 / E[X_i^2], with E[X_i^2] read off the model covariance.
    double relative_noise(const GaussianTreeModel& m, int node) const {
        return variances_[node - 1] / m.covariance()(node - 1, node - 1);
    }
    double max_relative_noise(const GaussianTreeModel& m) const {
        double s = 0.0;
        for (int i = 1; i <= dim(); ++i) s = std::max(s, relative_noise(m, i));
        return s;
    }

private:
    std::vector<double> variances_;
};

// Correlation matrix of Sigma* + D*; equals K* attenuated by
// 1/sqrt((1+S_i)(1+S_j)) off the diagonal.
inline CorrelationMatrix gaussian_noisy_correlations(const GaussianTreeModel& m,
                                                     const GaussianNoiseSpec& noise) {
    const int d = m.tree().node_count();
    if (noise.dim() != d)
        throw DimensionMismatch("gaussian_noisy_correlations: dimension mismatch");
    CorrelationMatrix out(d);
    const auto& cov = m.covariance();
    for (int i = 1; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j) {
            const double vi = cov(i - 1, i - 1) + noise.variance(i);
            const double vj = cov(j - 1, j - 1) + noise.variance(j);
            out.set(i, j, cov(i - 1, j - 1) / std::sqrt(vi * vj));
        }
    return out;
}

// ---------- model file format ----------
// Tree file lines followed by a single "w" line.

inline void write_gaussian_model(std::ostream& os, const GaussianTreeModel& m) {
    write_tree(os, m.tree());
    const auto old_precision = os.precision(17);
    os << m.w() << "\n";
    os.precision(old_precision);
}

inline GaussianTreeModel read_gaussian_model(std::istream& is) {
    TreeStructure t = read_tree(is);
    double w = 0.0;
    if (!(is >> w)) throw IoError("read_gaussian_model: missing w line");
    return GaussianTreeModel(std::move(t), w);
}

} // namespace treelearn
