#pragma once

#include <stdexcept>
#include <string>

namespace hessianlab {

// Bad value passed to an operation (wrong k, mismatched grids, ...).
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Input data violates a type invariant (non-Hermitian matrix, negative measure, ...).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Problem setup outside the supported envelope (grid too coarse, desk-scale limits, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iterative kernel failed to meet its own tolerance budget.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace hessianlab
