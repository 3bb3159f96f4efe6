#pragma once

#include <stdexcept>
#include <string>

namespace crane {

// Invalid inputs (non-finite values, violated parameter invariants,
// uncontrollable/unobservable pairs, singular transforms, ...).
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

// A numeric iteration failed to converge; carries the last residual.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_{0.0};
};

// Integration produced a non-finite stage value; carries the offending time.
class IntegrationError : public DomainError {
public:
    IntegrationError(const std::string& what, double t) : DomainError(what), time_(t) {}
    double time() const { return time_; }

private:
    double time_{0.0};
};

} // namespace crane
