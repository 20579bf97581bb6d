// SPDX-License-Identifier: MIT
#pragma once

#include <stdexcept>
#include <string>

namespace supbound {

// Argument outside the mathematical domain of a function (negative input to an
// inverse, h <= 0 for the modulus, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A documented validity window was violated (closed-form theta windows,
// log-power exponent window, non-integrable entropy integral).
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data (config files, measure files).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invariant broken inside a computation (e.g. a negative second moment).
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace supbound
