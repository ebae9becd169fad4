#include "ftn/reference.hpp"

#include <bit>
#include <cmath>
#include <limits>

#include "ftn/rng.hpp"

namespace ftn {

double to_es_n0_db(double snr_db, SnrUnit unit, Modulation kind) {
    if (unit == SnrUnit::EsN0) return snr_db;
    return snr_db + 10.0 * std::log10(static_cast<double>(bits_per_symbol(kind)));
}

double noise_variance_from_es_n0_db(double es_n0_db) {
    if (std::isinf(es_n0_db) && es_n0_db > 0) return 0.0;
    return std::pow(10.0, -es_n0_db / 10.0);
}

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

double qpsk_ber_closed_form(double eb_n0_db) {
    if (std::isinf(eb_n0_db) && eb_n0_db > 0) return 0.0;
    const double ebn0 = std::pow(10.0, eb_n0_db / 10.0);
    return q_function(std::sqrt(2.0 * ebn0));
}

namespace {

ReferencePoint simulate_nyquist(const Constellation& c, double es_n0_db, std::uint64_t seed,
                                const ReferenceOptions& opt) {
    const double variance = noise_variance_from_es_n0_db(es_n0_db);
    const unsigned k = c.bits_per_symbol();
    ReferencePoint pt;
    std::vector<std::uint8_t> bits(opt.block_symbols * k);
    for (std::uint64_t block = 0; !opt.stop.done(pt.bits, pt.errors); ++block) {
        Rng rng(derive_seed({seed, block}));
        for (auto& b : bits) b = rng.bit();
        const auto tx = modulate_indices(bits, c);
        for (std::size_t n = 0; n < tx.size(); ++n) {
            const cplx y = c.point(tx[n]) + rng.complex_gaussian(variance);
            const auto diff = c.label(tx[n]) ^ c.label(c.decide(y));
            pt.errors += static_cast<std::uint64_t>(std::popcount(diff));
        }
        pt.bits += bits.size();
    }
    pt.ber = static_cast<double>(pt.errors) / static_cast<double>(pt.bits);
    return pt;
}

} // namespace

std::vector<ReferencePoint> theoretical_ber_reference(Modulation kind, std::span<const double> snr_db,
                                                      std::uint64_t seed, const ReferenceOptions& options) {
    std::vector<ReferencePoint> out;
    const auto c = build_constellation(kind);
    for (std::size_t i = 0; i < snr_db.size(); ++i) {
        ReferencePoint pt;
        if (kind == Modulation::QPSK && !options.force_simulation) {
            const double ebn0 = options.unit == SnrUnit::EbN0 ? snr_db[i] : snr_db[i] - 10.0 * std::log10(2.0);
            pt.ber = qpsk_ber_closed_form(ebn0);
            pt.closed_form = true;
        } else {
            pt = simulate_nyquist(c, to_es_n0_db(snr_db[i], options.unit, kind), derive_seed({seed, i}), options);
        }
        pt.snr_db = snr_db[i];
        out.push_back(pt);
    }
    return out;
}

} // namespace ftn
