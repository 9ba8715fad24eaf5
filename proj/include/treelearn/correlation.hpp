#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "treelearn/errors.hpp"

namespace treelearn {

// Declared P2-style bounds on |rho| over tree edges.
struct CorrelationBounds {
    double rho_min;
    double rho_max;
};

// Symmetric d x d matrix of pairwise correlations with unit diagonal.
// Nodes are 1-based throughout, matching the tree labels.
class CorrelationMatrix {
public:
    explicit CorrelationMatrix(int d) : d_(d), data_(static_cast<std::size_t>(d) * d, 0.0) {
        if (d < 1) throw DimensionMismatch("CorrelationMatrix: d must be >= 1");
        for (int i = 1; i <= d; ++i) at(i, i) = 1.0;
    }

    int dim() const { return d_; }

    double operator()(int i, int j) const { return data_[idx(i, j)]; }

    // Sets the symmetric pair (i, j), i != j.
    void set(int i, int j, double value) {
        if (i == j) throw DomainError("CorrelationMatrix::set: diagonal is fixed at 1");
        if (!(value >= -1.0 && value <= 1.0))
            throw DomainError("CorrelationMatrix::set: correlation outside [-1, 1]");
        at(i, j) = value;
        at(j, i) = value;
    }

    bool operator==(const CorrelationMatrix& o) const { return d_ == o.d_ && data_ == o.data_; }

private:
    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i - 1) * d_ + static_cast<std::size_t>(j - 1);
    }
    double& at(int i, int j) { return data_[idx(i, j)]; }

    int d_;
    std::vector<double> data_;
};

} // namespace treelearn
