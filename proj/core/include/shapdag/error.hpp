#pragma once

#include <stdexcept>
#include <string>

namespace shapdag {

/// Invalid user-facing input: bad files, malformed values, domain violations.
/// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical or pipeline failure while processing valid input.
/// The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace shapdag
