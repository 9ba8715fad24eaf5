#pragma once

#include <stdexcept>
#include <string>

namespace treelearn {

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Guards explicit-state operations (joint distributions, class enumeration).
struct SizeGuard : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidShape : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NotPositiveDefinite : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ZeroVariance : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientCorrelation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SupportViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AssemblyAmbiguous : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Infeasible : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnknownPreset : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct GridMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace treelearn
