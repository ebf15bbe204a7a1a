#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace svip {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (dimension mismatch, bad scalar).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Invalid user-supplied configuration (malformed set, bad parameter window).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Cholesky factorization found a non-positive pivot.
class NotSpdError : public Error {
public:
    NotSpdError(std::size_t pivot, double value)
        : Error("matrix is not symmetric positive definite: pivot " + std::to_string(pivot) +
                " has value " + std::to_string(value)),
          pivot_(pivot), value_(value) {}

    std::size_t pivot() const noexcept { return pivot_; }
    double value() const noexcept { return value_; }

private:
    std::size_t pivot_;
    double value_;
};

/// A projection target set is empty.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

}  // namespace svip
