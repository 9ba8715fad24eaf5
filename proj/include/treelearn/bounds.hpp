#pragma once

#include <cmath>

#include "treelearn/errors.hpp"
#include "treelearn/recovery.hpp"

namespace treelearn {

namespace detail {
inline void check_bound_params(double rho_min, double rho_max, double q_max) {
    if (!(rho_min > 0.0 && rho_min <= rho_max && rho_max < 1.0))
        throw DomainError("sample bounds: need 0 < rho_min <= rho_max < 1");
    if (!(q_max >= 0.0 && q_max < 0.5))
        throw DomainError("sample bounds: need 0 <= q_max < 0.5");
}
} // namespace detail

// Below this n the minimax probability of leaving [T] is at least 1/2.
// rho_q = (1-2 q_max) rho_min; hypothesis requires d > 32.
inline double necessary_samples(int d, double rho_min, double rho_max, double q_max) {
    detail::check_bound_params(rho_min, rho_max, q_max);
    if (d <= 32) throw DomainError("necessary_samples: theorem hypothesis requires d > 32");
    const double rho_q = (1.0 - 2.0 * q_max) * rho_min;
    return std::log(static_cast<double>(d)) /
           (4.0 * (1.0 - rho_max) * rho_q * std::atanh(rho_q));
}

// n >= (128 / delta^2) log(6 d^2 / tau) with delta = t2^3 (1-alpha) / 128.
inline double sufficient_samples_ka(int d, double tau, double rho_min, double rho_max,
                                    double q_max) {
    detail::check_bound_params(rho_min, rho_max, q_max);
    if (!(tau > 0.0 && tau < 1.0)) throw DomainError("sufficient_samples_ka: tau in (0,1)");
    const double t2 = thresholds_ising(rho_min, rho_max, q_max).t2;
    const double alpha = quartet_alpha(rho_max);
    const double delta = t2 * t2 * t2 * (1.0 - alpha) / 128.0;
    return 128.0 / (delta * delta) * std::log(6.0 * d * static_cast<double>(d) / tau);
}

// n >= (2 / delta~^2) log(d^2 / tau) with delta~ = t2 (1-alpha) / 20.
// The same bound serves the SGA estimator.
inline double sufficient_samples_improved(int d, double tau, double rho_min, double rho_max,
                                          double q_max) {
    detail::check_bound_params(rho_min, rho_max, q_max);
    if (!(tau > 0.0 && tau < 1.0)) throw DomainError("sufficient_samples_improved: tau in (0,1)");
    const double t2 = thresholds_ising(rho_min, rho_max, q_max).t2;
    const double alpha = quartet_alpha(rho_max);
    const double delta = t2 * (1.0 - alpha) / 20.0;
    return 2.0 / (delta * delta) * std::log(d * static_cast<double>(d) / tau);
}

// Symmetric KL between adjacent members of the impossibility family:
// J = 2 atanh(rho_q) rho_q (1 - rho_max). rho_q as defined by the
// impossibility theorem, (1-2 q_max) rho_min; the family verifier resolves
// the competing (1-q_max) variant numerically.
inline double symmetric_kl_closed_form(double rho_min, double rho_max, double q_max) {
    detail::check_bound_params(rho_min, rho_max, q_max);
    const double rho_q = (1.0 - 2.0 * q_max) * rho_min;
    return 2.0 * std::atanh(rho_q) * rho_q * (1.0 - rho_max);
}

} // namespace treelearn
