#pragma once

#include <stdexcept>
#include <string>

namespace qtoa {

// Invalid physical parameters (negative widths, empty momentum band, ...).
struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A quadrature grid failed an adequacy check; `axis` names the offender.
struct QuadratureError : std::runtime_error {
    std::string axis;
    QuadratureError(std::string ax, const std::string& what)
        : std::runtime_error(what), axis(std::move(ax)) {}
};

// Readout requested before the incident packet has cleared the detector.
struct PrematureReadoutError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bimodal peaks too close to assign separate integration windows.
struct UnresolvablePeaksError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Damped-integral extrapolation did not converge.
struct RegularizationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical-resolution failure (bad fit, step underflow, unstable stepping).
struct ResolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qtoa
