#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpj {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid mathematical argument: division by zero, negative sqrt, bad diagonal.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A value left the representable range of its target format.
class RangeError : public Error {
public:
    using Error::Error;
};

class NonConvergenceError : public Error {
public:
    using Error::Error;
};

/// A non-positive pivot or eigenvalue showed up where positive definiteness is required.
class IndefiniteMatrixError : public Error {
public:
    using Error::Error;
};

/// Input to an orthogonalizer or preconditioner builder is too far from orthogonal.
class InvalidPreconditionerError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line)
    {
    }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace mpj
