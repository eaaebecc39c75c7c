#pragma once
#include <stdexcept>
#include <string>

namespace caet {

// Thrown when a mean vector has exact ties and the caller did not ask for a
// tie-breaking policy.
struct TieError : std::runtime_error {
    explicit TieError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an instance cannot be resolved by sampling paid arms, e.g. a
// defining pair whose two arms both have zero cost.
struct InfeasibleTaskError : std::runtime_error {
    explicit InfeasibleTaskError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when a statistic is requested for an arm that has never been pulled.
struct InsufficientDataError : std::runtime_error {
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an observed reward or cost is not a finite number.
struct InvalidObservationError : std::runtime_error {
    explicit InvalidObservationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace caet
