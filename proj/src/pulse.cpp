#include "ftn/pulse.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace ftn {

Tau Tau::reduced() const {
    const auto g = std::gcd(p, q);
    return {p / g, q / g};
}

void Tau::validate() const {
    if (p == 0 || q == 0 || p > q)
        throw PulseError("tau = P/Q needs 0 < P <= Q, got " + std::to_string(p) + "/" + std::to_string(q));
}

void SrrcSpec::validate() const {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw PulseError("SRRC rolloff must lie in (0, 1], got " + std::to_string(alpha));
    if (order < 3 || order % 2 == 0)
        throw PulseError("SRRC order must be odd and >= 3, got " + std::to_string(order));
    if (sps < 2)
        throw PulseError("SRRC needs at least 2 samples per symbol, got " + std::to_string(sps));
}

double srrc_value(double x, double alpha) {
    constexpr double pi = std::numbers::pi;
    if (x == 0.0) return 1.0 - alpha + 4.0 * alpha / pi;
    const double edge = 1.0 / (4.0 * alpha);
    if (std::abs(std::abs(x) - edge) < 1e-12 * edge) {
        return alpha / std::sqrt(2.0) *
               ((1.0 + 2.0 / pi) * std::sin(pi / (4.0 * alpha)) + (1.0 - 2.0 / pi) * std::cos(pi / (4.0 * alpha)));
    }
    const double num = std::sin(pi * x * (1.0 - alpha)) + 4.0 * alpha * x * std::cos(pi * x * (1.0 + alpha));
    const double den = pi * x * (1.0 - (4.0 * alpha * x) * (4.0 * alpha * x));
    return num / den;
}

namespace {

void normalize_energy(std::vector<double>& c) {
    const double e = std::inner_product(c.begin(), c.end(), c.begin(), 0.0);
    const double s = 1.0 / std::sqrt(e);
    for (auto& v : c) v *= s;
}

double centered_time(std::size_t i, std::size_t order, std::size_t sps) {
    const auto offset = static_cast<std::ptrdiff_t>(i) - static_cast<std::ptrdiff_t>((order - 1) / 2);
    return static_cast<double>(offset) / static_cast<double>(sps);
}

} // namespace

std::vector<double> srrc_impulse(const SrrcSpec& spec) {
    spec.validate();
    std::vector<double> c(spec.order);
    const std::size_t half = (spec.order - 1) / 2;
    for (std::size_t i = 0; i <= half; ++i) {
        const double v = srrc_value(centered_time(i, spec.order, spec.sps), spec.alpha);
        c[i] = v;
        c[spec.order - 1 - i] = v;
    }
    normalize_energy(c);
    return c;
}

std::vector<double> sinc_impulse(std::size_t order, std::size_t sps) {
    SrrcSpec{1.0, order, sps}.validate();
    std::vector<double> c(order);
    const std::size_t half = (order - 1) / 2;
    for (std::size_t i = 0; i <= half; ++i) {
        const double x = centered_time(i, order, sps);
        const double v = x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
        c[i] = v;
        c[order - 1 - i] = v;
    }
    normalize_energy(c);
    return c;
}

double Autocorrelation::at(std::ptrdiff_t lag) const {
    const auto idx = static_cast<std::ptrdiff_t>(center) + lag;
    if (idx < 0 || idx >= static_cast<std::ptrdiff_t>(values.size())) return 0.0;
    return values[static_cast<std::size_t>(idx)];
}

Autocorrelation autocorrelation(std::span<const double> p) {
    Autocorrelation g;
    if (p.empty()) return g;
    const std::size_t n = p.size();
    g.center = n - 1;
    g.values.assign(2 * n - 1, 0.0);
    for (std::size_t lag = 0; lag < n; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < n; ++i) acc += p[i + lag] * p[i];
        g.values[g.center + lag] = acc;
        g.values[g.center - lag] = acc;
    }
    return g;
}

namespace {

std::size_t chip_stride(std::size_t sps, Tau tau) {
    tau.validate();
    const std::uint64_t num = static_cast<std::uint64_t>(sps) * tau.p;
    if (num % tau.q != 0)
        throw PulseError("tau*sps = " + std::to_string(sps) + "*" + std::to_string(tau.p) + "/" +
                         std::to_string(tau.q) + " is not an integer chip stride");
    return static_cast<std::size_t>(num / tau.q);
}

} // namespace

std::size_t max_tap_span(const Autocorrelation& g, std::size_t sps, Tau tau) {
    const std::size_t stride = chip_stride(sps, tau);
    return g.center / stride + 1;
}

TapVector isi_taps(const Autocorrelation& g, std::size_t sps, Tau tau, std::size_t span) {
    const std::size_t stride = chip_stride(sps, tau);
    if (span == 0) throw PulseError("tap span must be at least 1");
    const double g0 = g.at(0);
    TapVector t;
    t.tau = tau;
    t.taps.resize(span);
    for (std::size_t n = 0; n < span; ++n)
        t.taps[n] = g.at(static_cast<std::ptrdiff_t>(n * stride)) / g0;
    t.taps[0] = 1.0;
    return t;
}

TapVector sinc_taps(Tau tau, std::size_t span) {
    tau.validate();
    TapVector t;
    t.tau = tau;
    t.taps.resize(span);
    for (std::size_t n = 0; n < span; ++n) {
        const double x = static_cast<double>(n) * tau.value();
        t.taps[n] = n == 0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    }
    return t;
}

TapVector TapVector::truncated(std::size_t new_span) const {
    TapVector t = *this;
    t.taps.resize(new_span, 0.0);
    return t;
}

} // namespace ftn
