#pragma once

#include <stdexcept>
#include <string>

namespace geomapprox {

// Invalid user input: bad parameters, malformed laws, violated preconditions.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// The law has no closed form or evaluation route for the requested quantity.
class UnsupportedLawError : public ValidationError {
public:
    explicit UnsupportedLawError(const std::string& what) : ValidationError(what) {}
};

// An NBU/NWU bound was requested for a horizon not carrying that tag.
class TagMismatchError : public ValidationError {
public:
    explicit TagMismatchError(const std::string& what) : ValidationError(what) {}
};

// The model collapses to a case where the approximation is undefined.
class DegenerateModelError : public ValidationError {
public:
    explicit DegenerateModelError(const std::string& what) : ValidationError(what) {}
};

// A numerical routine could not produce a certified answer.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace geomapprox
