#pragma once

#include <stdexcept>
#include <string>

namespace hotelml {

/// Base class for every error the toolkit raises.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A table does not match its expected schema (missing/extra columns, wrong types).
class SchemaError : public Error {
public:
    using Error::Error;
};

/// A single row is malformed; the message carries the line number and column.
class RowError : public Error {
public:
    using Error::Error;
};

/// A key-uniqueness or referential constraint was violated.
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// An argument is outside its documented domain.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// File could not be read/written or has an invalid serialized format.
class IoError : public Error {
public:
    using Error::Error;
};

/// Optimization produced a non-finite loss.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// The weak learner cannot beat chance on the first boosting round.
class UnboostableError : public Error {
public:
    using Error::Error;
};

}  // namespace hotelml
