#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tcurv {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input text could not be parsed. `offset` is the byte offset of the failure.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// A metric document or catalog request is malformed (missing field, bad shape, ...).
class SpecError : public Error {
public:
    using Error::Error;
};

/// A value left the domain of an operation (log of a negative number, t <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Tensor or chart dimensions do not fit the operation.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// The evaluated metric is not positive definite; `minor` is the 1-based index of
/// the first non-positive leading principal minor.
class DefinitenessError : public Error {
public:
    explicit DefinitenessError(int minor)
        : Error("metric is not positive definite (leading minor " + std::to_string(minor) +
                " is non-positive)"),
          minor_(minor) {}

    int minor() const noexcept { return minor_; }

private:
    int minor_;
};

/// An internal identity failed by a margin that indicates a bug rather than roundoff.
class ConsistencyError : public Error {
public:
    using Error::Error;
};

} // namespace tcurv
