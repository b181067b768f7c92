#pragma once

#include <stdexcept>
#include <string>

namespace fatou {

// Violated caller contract (bad dimensions, non-attracting spectrum, ...).
// The CLI maps these to exit code 2.
struct PreconditionError : std::runtime_error {
    explicit PreconditionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Iteration caps, non-convergence, degenerate sweeps.  CLI exit code 3.
struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// A resonance that cannot be placed in a triangular automorphism.
struct StructuralError : std::runtime_error {
    explicit StructuralError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fatou
