#pragma once

#include <stdexcept>
#include <string>

namespace kdecf {

/// Invalid or missing configuration (unknown names, missing constants).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (h <= 0, n < 2, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The operation is not defined for this kernel (e.g. the sinc kernel in a
/// density-kernel formula).
class UnsupportedKernelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure has no solution for the given input, such as a
/// density correction whose positive part integrates to less than one.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace kdecf
