#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace bbeta {

// Bad arguments or out-of-domain evaluation requests.
struct domain_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Evaluation landed on (or too close to) a pole of the function being computed.
struct pole_error : domain_error {
    pole_error(const std::string& what, std::complex<double> where)
        : domain_error(what + " at w = (" + std::to_string(where.real()) + ", " +
                       std::to_string(where.imag()) + "i)"),
          location(where) {}
    std::complex<double> location;
};

// An iterative scheme ran out of budget before reaching its tolerance.
struct convergence_error : std::runtime_error {
    convergence_error(const std::string& what, double partial, double estimate)
        : std::runtime_error(what + " (partial value " + std::to_string(partial) +
                             ", error estimate " + std::to_string(estimate) + ")"),
          partial_value(partial), error_estimate(estimate) {}
    explicit convergence_error(const std::string& what)
        : std::runtime_error(what), partial_value(0), error_estimate(0) {}
    double partial_value;
    double error_estimate;
};

// A dual-route consistency check failed beyond its pinned tolerance.
struct verification_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace bbeta
