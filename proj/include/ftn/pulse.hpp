#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace ftn {

class PulseError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Time acceleration as the rational P/Q (P upsample factor, Q shaping factor).
struct Tau {
    std::uint32_t p = 1;
    std::uint32_t q = 1;

    double value() const { return static_cast<double>(p) / static_cast<double>(q); }
    Tau reduced() const;
    void validate() const;
    friend bool operator==(const Tau&, const Tau&) = default;
};

struct SrrcSpec {
    double alpha = 0.3;
    std::size_t order = 201;
    std::size_t sps = 10;

    void validate() const;
};

enum class PulseShape { Srrc, Sinc };

// Analytic SRRC value sqrt(T) * h(t) at t/T = x, including the limits at
// x = 0 and |x| = 1/(4 alpha).
double srrc_value(double x, double alpha);

// Unit-energy, centre-symmetric FIR coefficients.
std::vector<double> srrc_impulse(const SrrcSpec& spec);
std::vector<double> sinc_impulse(std::size_t order, std::size_t sps);

// Full discrete autocorrelation (length 2*order-1), lag 0 at index `center`.
struct Autocorrelation {
    std::vector<double> values;
    std::size_t center = 0;

    double at(std::ptrdiff_t lag) const;
};

Autocorrelation autocorrelation(std::span<const double> p);

// Symmetric ISI coefficients G_{1,1..L}: taps[n] = g(n * tau * Ts), n = 0..L-1,
// scaled so taps[0] == 1.
struct TapVector {
    std::vector<double> taps;
    Tau tau;

    std::size_t span() const { return taps.size(); }
    double operator[](std::size_t n) const { return taps[n]; }
    TapVector truncated(std::size_t span) const;
};

TapVector isi_taps(const Autocorrelation& g, std::size_t sps, Tau tau, std::size_t span);

// Largest span for which every tap lies inside the autocorrelation support.
std::size_t max_tap_span(const Autocorrelation& g, std::size_t sps, Tau tau);

// Ideal (untruncated) sinc autocorrelation, sin(pi n tau)/(pi n tau).
TapVector sinc_taps(Tau tau, std::size_t span);

} // namespace ftn
