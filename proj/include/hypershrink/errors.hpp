#pragma once

#include <stdexcept>
#include <string>

namespace hypershrink {

// Invalid argument values: non-finite coordinates, negative radii, bad epsilons.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Caps exceeded, integer overflow, queries beyond a cached range.
struct RangeError : std::range_error {
    using std::range_error::range_error;
};

// State that should be impossible: det <= 0 frames, runaway reductions.
struct CorruptionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A required precomputed object (translate set, count cache) is missing.
struct DependencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed user input: bad radius specs, too-short fitting ranges, bad files.
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

} // namespace hypershrink
