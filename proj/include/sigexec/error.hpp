#pragma once

#include <stdexcept>
#include <string>

namespace sigexec {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad arguments, malformed files or configuration. Maps to CLI exit code 1.
class InputError : public Error {
public:
    using Error::Error;
};

/// The optimisation problem is ill-posed (indefinite or singular quadratic form).
/// Maps to CLI exit code 2.
class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, double extreme_eigenvalue)
        : Error(what), extreme_eigenvalue_(extreme_eigenvalue) {}

    double extreme_eigenvalue() const noexcept { return extreme_eigenvalue_; }

private:
    double extreme_eigenvalue_;
};

}  // namespace sigexec
