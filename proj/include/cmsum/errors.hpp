#pragma once

#include <stdexcept>
#include <string>

namespace cmsum {

//! Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

//! A marginal descriptor or problem file is malformed.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

//! The counter-monotonic sum is (numerically) a constant.
class DegenerateSum : public Error {
public:
    DegenerateSum() : Error("counter-monotonic sum is degenerate (g is constant)") {}
};

//! A threshold or retention lies outside the admissible open range.
class RangeError : public Error {
public:
    using Error::Error;
};

//! More crossings or atoms than the configured cap.
class CapExceeded : public Error {
public:
    using Error::Error;
};

//! Crossings could not be separated at the finest resolution.
class UnresolvedOscillation : public Error {
public:
    using Error::Error;
};

class InsufficientSamples : public Error {
public:
    using Error::Error;
};

class MismatchedTarget : public Error {
public:
    using Error::Error;
};

} // namespace cmsum
