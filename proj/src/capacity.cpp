#include "ftn/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace ftn {

void CapacityQuery::validate() const {
    if (!(power >= 0.0) || !(n0 > 0.0) || !(symbol_period > 0.0) || !(tau > 0.0 && tau <= 1.0))
        throw CapacityError("capacity query needs P >= 0, N0 > 0, Ts > 0 and 0 < tau <= 1");
    if (shape == PulseShape::Srrc && !(alpha > 0.0 && alpha <= 1.0))
        throw CapacityError("SRRC rolloff must lie in (0, 1]");
}

double CapacityQuery::spectrum(double f) const {
    const double af = std::abs(f);
    const double ts = symbol_period;
    if (shape == PulseShape::Sinc) return af <= 1.0 / (2.0 * ts) ? ts : 0.0;
    const double f1 = (1.0 - alpha) / (2.0 * ts);
    const double f2 = (1.0 + alpha) / (2.0 * ts);
    if (af <= f1) return ts;
    if (af > f2) return 0.0;
    return 0.5 * ts * (1.0 + std::cos(std::numbers::pi * ts / alpha * (af - f1)));
}

namespace {

double integrate_piece(const CapacityQuery& q, double a, double b) {
    if (!(b > a)) return 0.0;
    const double snr = 2.0 * q.power / q.n0;
    auto integrand = [&](double f) { return std::log2(1.0 + snr * q.spectrum(f)); };
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, a, b, 20,
                                                                                 kCapacityRelTol * 1e-2, &err);
    if (!std::isfinite(v) || err > kCapacityRelTol * std::max(std::abs(v), 1e-300) + 1e-300)
        throw CapacityError("capacity quadrature did not converge on [" + std::to_string(a) + ", " +
                            std::to_string(b) + "]");
    return v;
}

} // namespace

double shannon_capacity(const CapacityQuery& q, double bandwidth) {
    q.validate();
    if (!(bandwidth > 0.0)) throw CapacityError("bandwidth must be positive");
    if (q.power == 0.0) return 0.0;
    std::vector<double> cuts{0.0};
    if (q.shape == PulseShape::Srrc) {
        cuts.push_back((1.0 - q.alpha) / (2.0 * q.symbol_period));
        cuts.push_back((1.0 + q.alpha) / (2.0 * q.symbol_period));
    } else {
        cuts.push_back(1.0 / (2.0 * q.symbol_period));
    }
    cuts.push_back(bandwidth);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i];
        const double b = std::min(cuts[i + 1], bandwidth);
        if (a >= bandwidth) break;
        total += integrate_piece(q, a, b);
    }
    return total;
}

double ftn_capacity(const CapacityQuery& q) { return shannon_capacity(q, q.ftn_bandwidth()); }

double nyquist_capacity(const CapacityQuery& q) {
    q.validate();
    const double ts = q.symbol_period;
    return 1.0 / (2.0 * ts) * std::log2(1.0 + 2.0 * q.power * ts / q.n0);
}

double nyquist_capacity_quadrature(const CapacityQuery& q) {
    CapacityQuery flat = q;
    flat.shape = PulseShape::Sinc;
    return shannon_capacity(flat, 1.0 / (2.0 * q.symbol_period));
}

} // namespace ftn
