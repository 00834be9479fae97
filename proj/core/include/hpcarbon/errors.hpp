#pragma once

#include <stdexcept>
#include <string>

namespace hpcarbon {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Structurally malformed input (ragged rows, unterminated quotes, ...).
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Input is well-formed but does not match the expected schema
// (missing mandatory header, wrong column set, ...).
class SchemaError : public Error {
public:
    using Error::Error;
};

// A value violates a domain invariant (intensity out of bounds,
// non-increasing timestamps, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

// A raw field could not be normalized; carries the field name.
class NormalizationError : public Error {
public:
    NormalizationError(const std::string& msg, std::string field)
        : Error(msg), field_(std::move(field)) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

// Caller broke a documented precondition of an operation.
class ContractViolation : public Error {
public:
    using Error::Error;
};

// Bad argument value (negative quantity, horizon before window end, ...).
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Not enough data points to perform the operation.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

// Missing factor, unknown preset, inconsistent configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

// A referenced file is missing or unreadable; carries the path.
class FileError : public Error {
public:
    FileError(const std::string& msg, std::string path)
        : Error(msg + ": " + path), path_(std::move(path)) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

// An operation that requires at least one record got none.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

} // namespace hpcarbon
