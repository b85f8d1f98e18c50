#pragma once

#include <stdexcept>
#include <string>

namespace glyphguide {

// Base for every error the library raises. `what()` is a single line.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed textual/binary input (PPM headers, JSON annotations).
class ParseError : public Error {
public:
    using Error::Error;
};

// A value violates a domain type invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

class BoundsError : public Error {
public:
    using Error::Error;
};

// Wire-format decoding failure (TBAX, TBIC, TBWT, range-coded streams).
class DecodeError : public Error {
public:
    using Error::Error;
};

// Tensor shape mismatch; the message carries both shapes.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Symbol or value outside a coder alphabet.
class RangeError : public Error {
public:
    using Error::Error;
};

class UsageError : public Error {
public:
    using Error::Error;
};

// Training produced a non-finite loss or gradient.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace glyphguide
