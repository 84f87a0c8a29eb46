#pragma once

#include <stdexcept>
#include <string>

namespace pdg {

// Bad or inconsistent inputs: config files, segment times, sizes. CLI exit 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A costate norm fell below the floor where the thrust direction is undefined.
struct SingularCostateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gauss-Newton loop failed to make progress. CLI exit 3.
struct InnerSolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Switching-time Newton loop failed to converge. CLI exit 4.
struct OuterSolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Neither thrust profile produced a sign-consistent switching function. CLI exit 5.
struct ClassificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Artifact integrity or propagation failures during validation. CLI exit 2.
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace pdg
