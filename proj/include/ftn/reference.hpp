#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ftn/constellation.hpp"

namespace ftn {

enum class SnrUnit { EsN0, EbN0 };

// Per-symbol Es/N0 in dB for a grid value expressed in `unit`.
double to_es_n0_db(double snr_db, SnrUnit unit, Modulation kind);

// Complex noise variance per received sample for unit-energy symbols.
double noise_variance_from_es_n0_db(double es_n0_db);

double q_function(double x);
double qpsk_ber_closed_form(double eb_n0_db);

// Monte Carlo points keep going until bits >= min_bits and, unless max_bits
// is reached first, errors >= min_errors.
struct StoppingRule {
    std::uint64_t min_bits = 2'000'000;
    std::uint64_t min_errors = 200;
    std::uint64_t max_bits = 20'000'000;

    bool done(std::uint64_t bits, std::uint64_t errors) const {
        return bits >= min_bits && (errors >= min_errors || bits >= max_bits);
    }
};

struct ReferencePoint {
    double snr_db = 0.0;
    double ber = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    bool closed_form = false;
};

struct ReferenceOptions {
    SnrUnit unit = SnrUnit::EbN0;
    StoppingRule stop{};
    bool force_simulation = false;
    std::size_t block_symbols = 4096;
};

// ISI-free curve: closed-form for QPSK, otherwise a Nyquist (tau = 1)
// matched-filter simulation with the same nearest-point demapper.
std::vector<ReferencePoint> theoretical_ber_reference(Modulation kind, std::span<const double> snr_db,
                                                      std::uint64_t seed, const ReferenceOptions& options = {});

} // namespace ftn
