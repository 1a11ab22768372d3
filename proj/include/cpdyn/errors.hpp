#pragma once

#include <stdexcept>
#include <string>

namespace cpdyn {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// The chosen chart divisor is (numerically) zero.
class PivotTooSmall : public Error {
public:
    using Error::Error;
};

/// The Markovian damping system (I - M) u = b cannot be solved reliably.
class SingularDamping : public Error {
public:
    using Error::Error;
};

class StepSizeUnderflow : public Error {
public:
    using Error::Error;
};

class InvalidSpec : public Error {
public:
    using Error::Error;
};

class TooFewSamples : public Error {
public:
    using Error::Error;
};

// Front-end errors (scenario files, output).
class ConfigParse : public Error {
public:
    using Error::Error;
};

class FileIO : public Error {
public:
    using Error::Error;
};

class EmptySweep : public Error {
public:
    using Error::Error;
};

} // namespace cpdyn
