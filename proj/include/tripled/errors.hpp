#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tripled {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (t < 0, k <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Two objects that must agree structurally do not (e.g. mismatched grids).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// A non-finite value appeared where a finite one is required.
class NumericError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

/// Misuse of an API surface, e.g. requesting iterate diagnostics without a retained trace.
class UsageError : public Error {
public:
    using Error::Error;
};

/// Quadrature refinement budget exhausted before the successive-difference test passed.
class ToleranceNotMet : public Error {
public:
    ToleranceNotMet(const std::string& what, double best_estimate, double achieved_difference)
        : Error(what), best_estimate_(best_estimate), achieved_difference_(achieved_difference) {}

    double best_estimate() const noexcept { return best_estimate_; }
    double achieved_difference() const noexcept { return achieved_difference_; }

private:
    double best_estimate_;
    double achieved_difference_;
};

/// Picard residual blew past the divergence guard. Carries the residual trace so far.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::vector<double> residuals)
        : Error(what), residuals_(std::move(residuals)) {}

    const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

/// Every sampled pair was degenerate, so no ratio could be formed.
class InsufficientSamples : public Error {
public:
    using Error::Error;
};

}  // namespace tripled
