#pragma once

#include <Eigen/Cholesky>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "treelearn/correlation.hpp"
#include "treelearn/errors.hpp"
#include "treelearn/gaussian.hpp"
#include "treelearn/ising.hpp"
#include "treelearn/rng.hpp"

namespace treelearn {

enum class SampleKind { ising, gaussian };

// n x d matrix of observations, row-major. Ising entries are exactly +/-1.
class SampleMatrix {
public:
    SampleMatrix(int n, int d, SampleKind kind)
        : n_(n), d_(d), kind_(kind), values_(static_cast<std::size_t>(n) * d, 0.0) {
        if (n < 1 || d < 1) throw DimensionMismatch("SampleMatrix: n and d must be >= 1");
    }

    int sample_count() const { return n_; }
    int dim() const { return d_; }
    SampleKind kind() const { return kind_; }

    double operator()(int row, int col) const { return values_[idx(row, col)]; }
    double& operator()(int row, int col) { return values_[idx(row, col)]; }
    const std::vector<double>& values() const { return values_; }

private:
    std::size_t idx(int row, int col) const {
        return static_cast<std::size_t>(row) * d_ + static_cast<std::size_t>(col);
    }
    int n_, d_;
    SampleKind kind_;
    std::vector<double> values_;
};

// Ancestral sampling in BFS order rooted at node 1: the root is uniform on
// {+1,-1}; each child copies its parent with probability (1 + rho_e)/2.
inline SampleMatrix sample_ising(const IsingTreeModel& m, int n, RandomStream& rng) {
    const int d = m.tree().node_count();
    SampleMatrix s(n, d, SampleKind::ising);
    std::vector<int> order, parent;
    m.tree().bfs_order(1, order, parent);
    std::vector<double> copy_prob(d + 1, 0.0);
    for (std::size_t k = 1; k < order.size(); ++k) {
        const int v = order[k];
        copy_prob[v] = 0.5 * (1.0 + m.edge_correlation(parent[v], v));
    }
    for (int row = 0; row < n; ++row) {
        s(row, order[0] - 1) = rng.sign() > 0 ? 1.0 : -1.0;
        for (std::size_t k = 1; k < order.size(); ++k) {
            const int v = order[k];
            const double parent_val = s(row, parent[v] - 1);
            s(row, v - 1) = rng.bernoulli(copy_prob[v]) ? parent_val : -parent_val;
        }
    }
    return s;
}

// Independent sign flips: column j flips with probability q_j.
inline SampleMatrix apply_ising_noise(const SampleMatrix& s, const IsingNoiseSpec& noise,
                                      RandomStream& rng) {
    if (s.dim() != noise.dim()) throw DimensionMismatch("apply_ising_noise: dimension mismatch");
    SampleMatrix out = s;
    for (int row = 0; row < s.sample_count(); ++row)
        for (int col = 0; col < s.dim(); ++col) {
            const double q = noise.q(col + 1);
            if (q > 0.0 && rng.bernoulli(q)) out(row, col) = -out(row, col);
        }
    return out;
}

// i.i.d. draws from N(0, Sigma* + D*) via the Cholesky factor of the covariance.
inline SampleMatrix sample_gaussian(const GaussianTreeModel& m, const GaussianNoiseSpec& noise,
                                    int n, RandomStream& rng) {
    const int d = m.tree().node_count();
    if (noise.dim() != d) throw DimensionMismatch("sample_gaussian: dimension mismatch");
    Eigen::MatrixXd cov = m.covariance();
    for (int i = 0; i < d; ++i) cov(i, i) += noise.variance(i + 1);
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
        throw NotPositiveDefinite("sample_gaussian: Sigma* + D* is not positive definite");
    const Eigen::MatrixXd L = llt.matrixL();
    SampleMatrix s(n, d, SampleKind::gaussian);
    Eigen::VectorXd z(d);
    for (int row = 0; row < n; ++row) {
        for (int i = 0; i < d; ++i) z(i) = rng.normal();
        const Eigen::VectorXd x = L * z;
        for (int i = 0; i < d; ++i) s(row, i) = x(i);
    }
    return s;
}

// Ising: rho^_{ij} = (1/n) sum_k y_ki y_kj. Gaussian: zero-mean (uncentered)
// Pearson correlation by default; `centered` subtracts column means first.
inline CorrelationMatrix empirical_correlations(const SampleMatrix& s, bool centered = false) {
    const int n = s.sample_count();
    const int d = s.dim();
    CorrelationMatrix c(d);
    if (s.kind() == SampleKind::ising && !centered) {
        std::vector<double> acc(static_cast<std::size_t>(d) * d, 0.0);
        for (int row = 0; row < n; ++row) {
            const double* y = &s.values()[static_cast<std::size_t>(row) * d];
            for (int i = 0; i < d; ++i) {
                const double yi = y[i];
                double* a = &acc[static_cast<std::size_t>(i) * d];
                for (int j = i + 1; j < d; ++j) a[j] += yi * y[j];
            }
        }
        for (int i = 1; i <= d; ++i)
            for (int j = i + 1; j <= d; ++j)
                c.set(i, j, acc[static_cast<std::size_t>(i - 1) * d + (j - 1)] / n);
        return c;
    }
    std::vector<double> mean(d, 0.0);
    if (centered) {
        for (int row = 0; row < n; ++row)
            for (int i = 0; i < d; ++i) mean[i] += s(row, i);
        for (int i = 0; i < d; ++i) mean[i] /= n;
    }
    std::vector<double> acc(static_cast<std::size_t>(d) * d, 0.0);
    std::vector<double> sq(d, 0.0);
    std::vector<double> y(d);
    for (int row = 0; row < n; ++row) {
        for (int i = 0; i < d; ++i) y[i] = s(row, i) - mean[i];
        for (int i = 0; i < d; ++i) {
            sq[i] += y[i] * y[i];
            double* a = &acc[static_cast<std::size_t>(i) * d];
            for (int j = i + 1; j < d; ++j) a[j] += y[i] * y[j];
        }
    }
    for (int i = 0; i < d; ++i)
        if (sq[i] == 0.0) throw ZeroVariance("empirical_correlations: zero second moment column");
    for (int i = 1; i <= d; ++i)
        for (int j = i + 1; j <= d; ++j) {
            const double v = acc[static_cast<std::size_t>(i - 1) * d + (j - 1)] /
                             std::sqrt(sq[i - 1] * sq[j - 1]);
            c.set(i, j, std::max(-1.0, std::min(1.0, v)));
        }
    return c;
}

// ---------- sample CSV ----------
// One row per sample, comma separated; Ising entries serialized as 1 / -1.

inline void write_samples_csv(std::ostream& os, const SampleMatrix& s) {
    const auto old_precision = os.precision(17);
    for (int row = 0; row < s.sample_count(); ++row) {
        for (int col = 0; col < s.dim(); ++col) {
            if (col) os << ",";
            if (s.kind() == SampleKind::ising)
                os << static_cast<int>(s(row, col));
            else
                os << s(row, col);
        }
        os << "\n";
    }
    os.precision(old_precision);
}

inline SampleMatrix read_samples_csv(std::istream& is, SampleKind kind) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError("read_samples_csv: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("read_samples_csv: no data");
    SampleMatrix s(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()), kind);
    for (int r = 0; r < s.sample_count(); ++r)
        for (int c = 0; c < s.dim(); ++c) s(r, c) = rows[r][c];
    return s;
}

} // namespace treelearn
