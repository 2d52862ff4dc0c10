#pragma once

#include <stdexcept>

namespace sigfield {

// Bad user-supplied configuration (unknown kind, mismatched sizes, ...).
// The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input fails a mathematical precondition (e.g. non-centered embedding target).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Conditioning on a set of measure zero.
struct EmptyConditioningError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Model fitting on unusable data.
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace sigfield
