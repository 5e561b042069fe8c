#pragma once

#include <stdexcept>
#include <string>

namespace fsys {

/// Base for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed problem or constraint document.
struct SchemaError : Error {
    explicit SchemaError(const std::string& what) : Error(what) {}
};

/// Input outside an operation's domain (interval bounds, non-Hermitian data, ...).
struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(what) {}
};

/// Numerical procedure could not produce a trustworthy result.
struct NumericsError : Error {
    explicit NumericsError(const std::string& what) : Error(what) {}
};

}  // namespace fsys
