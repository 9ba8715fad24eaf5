#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "treelearn/correlation.hpp"
#include "treelearn/errors.hpp"

namespace treelearn {

// alpha = (1 + rho_max^2) / 2, always in (0.5, 1).
inline double quartet_alpha(double rho_max) {
    if (!(rho_max > 0.0 && rho_max < 1.0))
        throw DomainError("quartet_alpha: rho_max must be in (0, 1)");
    return 0.5 * (1.0 + rho_max * rho_max);
}

// The three ways to pair node 1 in {1,2,3,4}: {1,2}|{3,4}, {1,3}|{2,4}, {1,4}|{2,3}.
enum class QuartetPairing { p12_34, p13_24, p14_23 };

struct QuartetVerdict {
    bool star;
    QuartetPairing pairing;  // meaningful only when !star
    double margin;           // distance of the deciding statistic from alpha
};

// Denominator guard; in the recovery pipeline quartets come from proximal
// sets so this never triggers, but the classifier is a public operation.
inline constexpr double kQuartetDenominatorEps = 1e-12;

namespace detail {

struct QuartetCorr {
    double r12, r13, r14, r23, r24, r34;
};

inline QuartetCorr extract_quartet(const CorrelationMatrix& c) {
    if (c.dim() != 4) throw DimensionMismatch("quartet classifier: expected a 4x4 matrix");
    QuartetCorr q{c(1, 2), c(1, 3), c(1, 4), c(2, 3), c(2, 4), c(3, 4)};
    for (double v : {q.r12, q.r13, q.r14, q.r23, q.r24, q.r34})
        if (std::abs(v) < kQuartetDenominatorEps)
            throw InsufficientCorrelation("quartet classifier: |rho| below denominator guard");
    return q;
}

} // namespace detail

// IS_NON_STAR: the three guarded ratio branches, evaluated in order; all
// inequalities strict, ties fall through to Star.
inline QuartetVerdict classify_ka(const CorrelationMatrix& c, double alpha) {
    const auto q = detail::extract_quartet(c);
    struct Branch {
        QuartetPairing pairing;
        double lo, hi; // requires lo < alpha and hi > alpha
    };
    const std::array<Branch, 3> branches{{
        {QuartetPairing::p12_34, q.r13 * q.r24 / (q.r12 * q.r34), q.r13 * q.r24 / (q.r14 * q.r23)},
        {QuartetPairing::p13_24, q.r12 * q.r34 / (q.r13 * q.r24), q.r12 * q.r34 / (q.r14 * q.r23)},
        {QuartetPairing::p14_23, q.r12 * q.r34 / (q.r14 * q.r23), q.r12 * q.r34 / (q.r13 * q.r24)},
    }};
    double best_near_miss = -std::numeric_limits<double>::infinity();
    for (const auto& b : branches) {
        const double slack = std::min(alpha - b.lo, b.hi - alpha);
        if (b.lo < alpha && b.hi > alpha) return {false, b.pairing, slack};
        best_near_miss = std::max(best_near_miss, slack);
    }
    return {true, QuartetPairing::p12_34, -best_near_miss};
}

// SGA_IS_NON_STAR: v_i = geometric mean of the two cross ratios for each
// pairing, v = min, declare non-star with pair {1, i*} when v < alpha.
// Argmin ties break toward the smaller index.
inline QuartetVerdict classify_sga(const CorrelationMatrix& c, double alpha) {
    const auto q = detail::extract_quartet(c);
    const double a12 = std::abs(q.r12 * q.r34);
    const double a13 = std::abs(q.r13 * q.r24);
    const double a14 = std::abs(q.r14 * q.r23);
    const double v2 = std::sqrt(a13 * a14) / a12;
    const double v3 = std::sqrt(a12 * a14) / a13;
    const double v4 = std::sqrt(a12 * a13) / a14;
    double v = v2;
    QuartetPairing pairing = QuartetPairing::p12_34;
    if (v3 < v) {
        v = v3;
        pairing = QuartetPairing::p13_24;
    }
    if (v4 < v) {
        v = v4;
        pairing = QuartetPairing::p14_23;
    }
    if (v < alpha) return {false, pairing, alpha - v};
    return {true, QuartetPairing::p12_34, v - alpha};
}

enum class QuartetClassifier { ka, sga };

inline QuartetVerdict classify_quartet(const CorrelationMatrix& c, double alpha,
                                       QuartetClassifier which) {
    return which == QuartetClassifier::ka ? classify_ka(c, alpha) : classify_sga(c, alpha);
}

} // namespace treelearn
