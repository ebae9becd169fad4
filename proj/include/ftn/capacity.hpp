#pragma once

#include <stdexcept>

#include "ftn/pulse.hpp"

namespace ftn {

class CapacityError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Pulse spectrum plus link budget for the AWGN capacity integrals. Every
// quantity is in consistent (normalized) units; capacities come out in
// bit/s when symbol_period is in seconds.
struct CapacityQuery {
    PulseShape shape = PulseShape::Srrc;
    double alpha = 0.3;
    double power = 1.0;          // average transmit power P
    double n0 = 1.0;             // noise PSD N0
    double symbol_period = 1.0;  // Ts
    double tau = 1.0;

    void validate() const;
    // |P(f)|^2 of the unit-energy pulse (raised-cosine shape for SRRC).
    double spectrum(double f) const;
    double ftn_bandwidth() const { return 1.0 / (2.0 * tau * symbol_period); }
};

inline constexpr double kCapacityRelTol = 1e-8;

// int_0^W log2(1 + (2P/N0)|P(f)|^2) df by adaptive Gauss-Kronrod with
// breakpoints at the raised-cosine band edges.
double shannon_capacity(const CapacityQuery& q, double bandwidth);
double ftn_capacity(const CapacityQuery& q);
// Closed form (1/(2Ts)) log2(1 + 2 P Ts / N0).
double nyquist_capacity(const CapacityQuery& q);
// The same Nyquist integral evaluated by quadrature (cross-check).
double nyquist_capacity_quadrature(const CapacityQuery& q);

} // namespace ftn
