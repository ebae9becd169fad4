#include "ftn/chain.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "ftn/reference.hpp"

namespace ftn {

FtnConfig FtnConfig::make(Tau tau, double alpha, std::size_t order) {
    FtnConfig cfg;
    // A Nyquist 1/1 would leave a single sample per symbol.
    if (tau.q == 1) tau = {tau.p * 10, 10};
    cfg.tau = tau;
    cfg.srrc = SrrcSpec{alpha, order, tau.q};
    return cfg;
}

void FtnConfig::validate() const {
    tau.validate();
    srrc.validate();
    if (std::isnan(es_n0_db) || es_n0_db == -std::numeric_limits<double>::infinity())
        throw ChainError("Es/N0 must be finite or +inf");
    (void)stride();
}

std::size_t FtnConfig::stride() const {
    const std::uint64_t num = static_cast<std::uint64_t>(srrc.sps) * tau.p;
    if (num % tau.q != 0)
        throw ChainError("sps " + std::to_string(srrc.sps) + " does not give an integer stride for tau " +
                         std::to_string(tau.p) + "/" + std::to_string(tau.q));
    return static_cast<std::size_t>(num / tau.q);
}

FtnChain::FtnChain(const FtnConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    pulse_ = cfg_.shape == PulseShape::Srrc ? srrc_impulse(cfg_.srrc) : sinc_impulse(cfg_.srrc.order, cfg_.srrc.sps);
    g_ = autocorrelation(pulse_);
    stride_ = cfg_.stride();
}

std::size_t FtnChain::full_span() const { return max_tap_span(g_, cfg_.srrc.sps, cfg_.tau); }

TapVector FtnChain::channel_taps() const { return taps(full_span()); }

TapVector FtnChain::taps(std::size_t span) const { return isi_taps(g_, cfg_.srrc.sps, cfg_.tau, span); }

std::vector<cplx> FtnChain::transmit(std::span<const cplx> symbols) const {
    if (symbols.empty()) throw ChainError("transmit: empty symbol block");
    const std::size_t order = pulse_.size();
    const double amp = std::sqrt(cfg_.tau.value());
    std::vector<cplx> wave(symbols.size() * stride_ + order - 1, cplx{});
    for (std::size_t n = 0; n < symbols.size(); ++n) {
        const cplx a = amp * symbols[n];
        cplx* out = wave.data() + n * stride_;
        for (std::size_t i = 0; i < order; ++i) out[i] += a * pulse_[i];
    }
    return wave;
}

double FtnChain::symbol_noise_variance() const { return noise_variance_from_es_n0_db(cfg_.es_n0_db); }

double FtnChain::chip_noise_variance() const {
    // Matched-filter gain is sum p^2 = 1 and the desired branch carries
    // sqrt(tau), so the sampled noise is scaled back by 1/tau in receive().
    return cfg_.tau.value() * symbol_noise_variance();
}

void FtnChain::add_awgn(std::span<cplx> wave, Rng& rng) const {
    const double var = chip_noise_variance();
    if (var == 0.0) return;
    for (auto& s : wave) s += rng.complex_gaussian(var);
}

ReceivedSequence FtnChain::receive(std::span<const cplx> wave, std::size_t n_symbols) const {
    const std::size_t order = pulse_.size();
    if (n_symbols == 0 || wave.size() < (n_symbols - 1) * stride_ + order)
        throw ChainError("receive: waveform of " + std::to_string(wave.size()) + " chips cannot yield " +
                         std::to_string(n_symbols) + " symbols");
    const double gain = 1.0 / std::sqrt(cfg_.tau.value());
    ReceivedSequence rx;
    rx.n_symbols = n_symbols;
    rx.noise_variance = symbol_noise_variance();
    rx.y.resize(n_symbols);
    // z[m] = sum_i p[i] x[m - i], sampled at m = (order - 1) + k * stride.
    for (std::size_t k = 0; k < n_symbols; ++k) {
        const std::size_t m = order - 1 + k * stride_;
        cplx acc{};
        for (std::size_t i = 0; i < order; ++i) {
            const std::size_t j = m - i;
            if (j < wave.size()) acc += pulse_[i] * wave[j];
        }
        rx.y[k] = gain * acc;
    }
    return rx;
}

std::vector<cplx> FtnChain::matched_noise(std::size_t n_symbols, Rng& rng) const {
    const std::size_t order = pulse_.size();
    const double var = chip_noise_variance();
    std::vector<cplx> out(n_symbols, cplx{});
    if (var == 0.0 || n_symbols == 0) return out;
    // Only chips that reach a sampling instant matter.
    std::vector<cplx> chips((n_symbols - 1) * stride_ + order);
    for (auto& c : chips) c = rng.complex_gaussian(var);
    const double gain = 1.0 / std::sqrt(cfg_.tau.value());
    for (std::size_t k = 0; k < n_symbols; ++k) {
        const cplx* base = chips.data() + k * stride_;
        cplx acc{};
        for (std::size_t i = 0; i < order; ++i) acc += pulse_[order - 1 - i] * base[i];
        out[k] = gain * acc;
    }
    return out;
}

ReceivedSequence analytic_receive(std::span<const cplx> symbols, const TapVector& taps,
                                  std::optional<std::span<const cplx>> noise, double noise_variance) {
    const std::size_t n = symbols.size();
    const std::size_t span = taps.span();
    ReceivedSequence rx;
    rx.n_symbols = n;
    rx.noise_variance = noise_variance;
    rx.y.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc = taps[0] * symbols[k];
        for (std::size_t d = 1; d < span; ++d) {
            if (k >= d) acc += taps[d] * symbols[k - d];
            if (k + d < n) acc += taps[d] * symbols[k + d];
        }
        rx.y[k] = acc;
    }
    if (noise) {
        if (noise->size() != n) throw ChainError("analytic_receive: noise length mismatch");
        for (std::size_t k = 0; k < n; ++k) rx.y[k] += (*noise)[k];
    }
    return rx;
}

} // namespace ftn
