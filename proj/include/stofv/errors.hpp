#pragma once

#include <stdexcept>
#include <string>

namespace stofv {

/// Invalid or inconsistent configuration (unknown names, out-of-range parameters).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A time step violates the CFL restriction, or a validation check failed.
class CflError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The discrete state became non-finite.
class BlowupError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace stofv
