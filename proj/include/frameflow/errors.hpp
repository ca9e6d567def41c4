#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace frameflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a scheme or configuration violates a structural invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Raised by iterative numerics that fail to reach their stopping criterion.
class NumericError : public Error {
public:
    using Error::Error;
};

class PoleAt : public Error {
public:
    explicit PoleAt(std::complex<double> z);
    std::complex<double> point;
};

class NotLoxodromic : public Error {
public:
    using Error::Error;
};

class PoleOnBoundary : public Error {
public:
    using Error::Error;
};

class PoleInside : public Error {
public:
    using Error::Error;
};

class InadmissibleBranch : public Error {
public:
    using Error::Error;
};

class OutsideCoding : public Error {
public:
    using Error::Error;
};

class CapacityExceeded : public Error {
public:
    using Error::Error;
};

class EmptyBall : public Error {
public:
    using Error::Error;
};

class InsufficientWords : public Error {
public:
    using Error::Error;
};

class HorizonExceeded : public Error {
public:
    using Error::Error;
};

class InsufficientDecayWindow : public Error {
public:
    using Error::Error;
};

class NoConvergence : public NumericError {
public:
    NoConvergence(const std::string& what, double residual_right, double residual_left);
    double residual_right;
    double residual_left;
};

class BracketFailure : public NumericError {
public:
    using NumericError::NumericError;
};

class Divergence : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace frameflow
