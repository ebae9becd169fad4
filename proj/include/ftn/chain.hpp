#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ftn/constellation.hpp"
#include "ftn/pulse.hpp"
#include "ftn/rng.hpp"

namespace ftn {

class ChainError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// es_n0_db is the energy of one transmitted FTN symbol pulse over N0, so the
// matched-filter sample of a unit-energy symbol sees noise variance
// 10^(-es_n0_db/10) regardless of tau.
struct FtnConfig {
    Tau tau{9, 10};
    SrrcSpec srrc{0.3, 201, 10};
    PulseShape shape = PulseShape::Srrc;
    double es_n0_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 1;

    // sps follows Q so the stride P is exact.
    static FtnConfig make(Tau tau, double alpha, std::size_t order = 201);
    void validate() const;
    Tau reduced_tau() const { return tau.reduced(); }
    std::size_t stride() const;
};

struct ReceivedSequence {
    std::vector<cplx> y;
    std::size_t n_symbols = 0;
    double noise_variance = 0.0;
};

// Transmit -> AWGN -> matched filter -> stride-P sampler, with compensated
// group delay of order-1 chips.
class FtnChain {
  public:
    explicit FtnChain(const FtnConfig& cfg);

    const FtnConfig& config() const { return cfg_; }
    std::span<const double> pulse() const { return pulse_; }
    const Autocorrelation& pulse_autocorrelation() const { return g_; }

    // Tap vector over the whole autocorrelation support.
    TapVector channel_taps() const;
    TapVector taps(std::size_t span) const;
    std::size_t full_span() const;

    // sqrt(tau Es) * sum_n a_n p(t - n tau Ts), length N*P + order - 1.
    std::vector<cplx> transmit(std::span<const cplx> symbols) const;
    // Per-chip noise variance that yields the configured per-symbol SNR.
    double chip_noise_variance() const;
    void add_awgn(std::span<cplx> wave, Rng& rng) const;
    ReceivedSequence receive(std::span<const cplx> wave, std::size_t n_symbols) const;

    // White chip noise seen through the matched filter and the sampler only;
    // same statistics as receive(add_awgn(0)).
    std::vector<cplx> matched_noise(std::size_t n_symbols, Rng& rng) const;

    double symbol_noise_variance() const;

  private:
    FtnConfig cfg_;
    std::vector<double> pulse_;
    Autocorrelation g_;
    std::size_t stride_ = 1;
};

// y_k = sum_{|k-n| <= L-1} a_n G_{|k-n|}; symbols outside the block are zero.
ReceivedSequence analytic_receive(std::span<const cplx> symbols, const TapVector& taps,
                                  std::optional<std::span<const cplx>> noise = std::nullopt,
                                  double noise_variance = 0.0);

} // namespace ftn
