#pragma once

#include <stdexcept>
#include <string>

namespace eduqa {

// Base error for the library. CLI maps Error -> exit 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Input/validation failures (malformed records, bad enums, missing
// prerequisites). CLI maps ValidationError -> exit 2.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& msg) : Error(msg) {}
};

}  // namespace eduqa
