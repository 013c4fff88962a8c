// SPDX-License-Identifier: Apache-2.0
//
// gvdlink: SER analysis of broadband THz links under atmospheric
// group velocity dispersion.

#pragma once

#include <stdexcept>
#include <string>

namespace gvdlink {

/// Bad or inconsistent configuration / input values.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data. Carries the 1-based row number when known.
class ParseError : public std::runtime_error {
public:
    ParseError(std::string msg, long row = -1)
        : std::runtime_error(row >= 0 ? "row " + std::to_string(row) + ": " + msg : msg),
          row_(row) {}
    long row() const noexcept { return row_; }

private:
    long row_;
};

/// Catalog source contained no data rows at all.
class EmptyCatalogError : public ParseError {
public:
    EmptyCatalogError() : ParseError("catalog contains no data rows") {}
};

/// Violated numeric-domain precondition (grid coverage, span, ranges).
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numeric failure while computing (unwrap resolution, calibration,
/// enumeration budget, non-monotone bisection input).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File-system level failure.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace gvdlink
