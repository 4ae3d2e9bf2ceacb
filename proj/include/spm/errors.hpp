#pragma once

#include <stdexcept>
#include <string>

namespace spm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input (scene documents, sources, configs).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A query point outside the domain or inside an obstacle.
class DomainError : public Error {
public:
    using Error::Error;
};

/// The query point is not connected to any source.
class NoPathError : public Error {
public:
    using Error::Error;
};

/// Bad arguments to an operation (mismatched resolutions and the like).
class UsageError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// An invariant that should be impossible to break was broken.
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace spm
