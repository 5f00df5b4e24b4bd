#pragma once

#include <stdexcept>
#include <string>

namespace cgs {

/// Raised when a caller violates a documented precondition (shapes, ranges).
class ContractError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when arithmetic produces NaN/Inf where finite values are required.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ContractError(message);
}

}  // namespace cgs
