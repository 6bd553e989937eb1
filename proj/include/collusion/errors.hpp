#pragma once

#include <stdexcept>
#include <string>

namespace collusion {

/// Invalid model or configuration input (N, λ, s, v, tolerances, brackets).
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed: quadrature did not converge, no bracket
/// could be built, a non-finite value appeared.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quantity requested outside the region where it is defined, e.g. δ*
/// below the reservation-price threshold.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace collusion
