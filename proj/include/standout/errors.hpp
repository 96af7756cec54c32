#pragma once

#include <stdexcept>
#include <string>

namespace standout {

/// Argument outside an operation's domain.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Epoch index at or past the list length.
struct HorizonError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// Environment fails the interior-solution condition.
struct NonInteriorError : DomainError {
    using DomainError::DomainError;
};

/// Root bracketing, leakage or divergence failures.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Caller passed a history that the operation's precondition excludes.
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

/// Feature aggregates give a degenerate prior variance.
struct CalibrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed or invalid configuration input.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace standout
