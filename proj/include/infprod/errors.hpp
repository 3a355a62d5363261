#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace infprod {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions do not conform.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A NaN or infinity entered or left a computation.
class NonFiniteError : public Error {
public:
    using Error::Error;
};

/// Linear solve hit a pivot that is zero to working precision.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, double pivot)
        : Error(what), pivot_(pivot) {}

    double pivot() const noexcept { return pivot_; }

private:
    double pivot_;
};

/// The Stein equation has no positive definite solution (spectral radius >= 1
/// or numerically indistinguishable from it).
class NoContractingNormError : public Error {
public:
    using Error::Error;
};

/// A contraction certificate is malformed (rate outside [0, 1), or a k-step
/// certificate used where a one-step bound is needed).
class InvalidCertificateError : public Error {
public:
    using Error::Error;
};

/// A declared contraction certificate does not hold for some factor.
class CertificateViolatedError : public Error {
public:
    CertificateViolatedError(const std::string& what, std::size_t step)
        : Error(what), step_(step) {}

    /// 1-based index of the offending factor.
    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// The contraction hypothesis could not be established, so no verdict is given.
class AnalysisRefusedError : public Error {
public:
    using Error::Error;
};

/// Malformed sequence file or command-line input.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace infprod
