#pragma once

#include <stdexcept>
#include <string>

namespace qsis {

// Parameter/precondition violations (CLI exit code 1).
struct InvalidParameter : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Geometry problems: regions leaving the grid, points outside their domain.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The space has no active shifts / zero rank on the window.
struct DegenerateSpaceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Sample matrix failed the injectivity check; carries the singular-value gap.
struct NotInjectiveError : std::runtime_error {
    NotInjectiveError(const std::string& msg, double smin, double smax)
        : std::runtime_error(msg), smin(smin), smax(smax) {}
    double smin;
    double smax;
};

} // namespace qsis
