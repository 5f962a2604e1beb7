#pragma once

#include <stdexcept>
#include <string>

namespace istdforge {

/// Base class for every error thrown by this library.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File could not be read or written.
class io_error : public error {
public:
    using error::error;
};

/// File exists but is not a format this library understands.
class format_error : public error {
public:
    using error::error;
};

/// A caller-supplied value violates an operation's preconditions.
class argument_error : public error {
public:
    using error::error;
};

/// An iterative solver stopped before reaching its tolerance.
class convergence_error : public error {
public:
    convergence_error(const std::string& what, double residual)
        : error(what), residual_(residual) {}

    /// Relative residual at the moment the solver gave up.
    double residual() const { return residual_; }

private:
    double residual_;
};

} // namespace istdforge
