// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria (capped at 100).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "ftn/capacity.hpp"
#include "ftn/chain.hpp"
#include "ftn/estimators.hpp"
#include "ftn/harness.hpp"
#include "ftn/rng.hpp"

namespace {

using namespace ftn;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::vector<cplx> random_symbols(const Constellation& c, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<cplx> out(n);
    for (auto& s : out) s = c.point(rng.engine()() % c.size());
    return out;
}

const std::vector<std::pair<Tau, double>>& tau_alpha_grid() {
    static const std::vector<std::pair<Tau, double>> g{
        {{4, 5}, 0.3}, {{4, 5}, 0.4}, {{4, 5}, 0.5}, {{9, 10}, 0.3}, {{9, 10}, 0.4}, {{9, 10}, 0.5},
    };
    return g;
}

Outcome tap_chain_equivalence() {
    double worst = 0.0;
    for (const auto& [tau, alpha] : tau_alpha_grid())
        for (auto m : {Modulation::QPSK, Modulation::APSK256}) {
            const auto c = build_constellation(m);
            const FtnChain chain(FtnConfig::make(tau, alpha));
            const auto a = random_symbols(c, 1000, derive_seed({tau.p, tau.q, hash_string(to_string(m))}));
            const auto full = chain.receive(chain.transmit(a), a.size());
            const auto fast = analytic_receive(a, chain.channel_taps());
            for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(full.y[k] - fast.y[k]));
        }
    return {worst < 1e-6, "max |full - tap| = " + fmt("%.3e", worst) + " (tol 1e-6)"};
}

Outcome fig2_oracle() {
    const std::vector<cplx> a{1, 1, -1, 1, -1};
    const Tau tau{4, 5};
    const auto taps = sinc_taps(tau, a.size());
    const auto rx = analytic_receive(a, taps);
    // Independent brute force: sum_n a_n sinc((k - n) tau).
    double oracle_gap = 0.0;
    std::vector<double> isi(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        double y = 0.0;
        for (std::size_t n = 0; n < a.size(); ++n) {
            const double x = (static_cast<double>(k) - static_cast<double>(n)) * tau.value();
            y += a[n].real() * (x == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x));
        }
        oracle_gap = std::max(oracle_gap, std::abs(rx.y[k] - y));
        isi[k] = rx.y[k].real() - a[k].real();
    }
    // The convolution places 0.61 on the first symbol and 0.32 on the second.
    const bool ok = oracle_gap < 1e-12 && std::abs(std::abs(isi[0]) - 0.61) <= 0.01 &&
                    std::abs(std::abs(isi[1]) - 0.32) <= 0.01;
    return {ok, "ISI[0] = " + fmt("%+.4f", isi[0]) + ", ISI[1] = " + fmt("%+.4f", isi[1]) +
                    " (targets 0.61, 0.32 +- 0.01), oracle gap " + fmt("%.1e", oracle_gap)};
}

Outcome complexity_equality() {
    std::vector<EstimatorConfig> configs;
    for (const auto& s : preset_group("table2-grid"))
        for (const auto& e : s.estimators) {
            bool seen = false;
            for (const auto& c : configs) seen = seen || c.id() == e.id();
            if (!seen) configs.push_back(e);
        }
    std::size_t bad = 0;
    std::string first_bad;
    for (const auto& row : complexity_report(configs, true, 3000)) {
        if (!row.exact) {
            if (first_bad.empty()) first_bad = row.estimator;
            ++bad;
        }
    }
    const bool examples = op_count(EstimatorConfig::mlisic(6, 2)).mults == 20 &&
                          op_count(EstimatorConfig::sssgbkse(6, 3)).mults == 31;
    std::string d = std::to_string(configs.size()) + " configs, " + std::to_string(bad) + " mismatches";
    if (!first_bad.empty()) d += " (first " + first_bad + ")";
    d += examples ? "; MLISIC(6,2)=20, SSSgbKSE(6,3)=31" : "; worked examples wrong";
    return {bad == 0 && examples, d};
}

Outcome length_constraints() {
    const std::vector<std::size_t> a{7, 6}, b{10, 9, 8, 7, 6}, c{6, 6};
    const bool r1 = validate_lengths(2, a, LengthMode::Optimal).valid;
    const bool r2 = validate_lengths(5, b, LengthMode::Simplified).valid;
    const bool r3 = !validate_lengths(2, c, LengthMode::Optimal).valid;
    const auto custom = validate_lengths(2, c, LengthMode::Custom);
    const bool r4 = custom.valid && !custom.warnings.empty();
    return {r1 && r2 && r3 && r4, std::string("[7,6] optimal ") + (r1 ? "ok" : "REJECTED") +
                                      ", [10,9,8,7,6] simplified " + (r2 ? "ok" : "REJECTED") + ", [6,6] optimal " +
                                      (r3 ? "rejected" : "ACCEPTED") + ", [6,6] custom " +
                                      (r4 ? "warns" : "NO WARNING")};
}

Outcome noiseless_recovery() {
    std::vector<Scenario> rows;
    for (const auto& name : preset_names())
        if (name.starts_with("table3-") || name.starts_with("table4-")) rows.push_back(preset(name));
    std::size_t failing = 0, total = 0;
    std::string failures;
    for (auto s : rows) {
        s.snr_db = {std::numeric_limits<double>::infinity()};
        s.stop = {static_cast<std::uint64_t>(10000) * bits_per_symbol(s.modulation), 0,
                  static_cast<std::uint64_t>(10000) * bits_per_symbol(s.modulation)};
        s.block_symbols = 10000;
        for (const auto& r : run_scenario(s)) {
            ++total;
            if (r.errors != 0) {
                ++failing;
                failures += " " + s.id + "/" + r.estimator + "=" + fmt("%.2e", r.ber);
            }
        }
    }
    return {failing == 0, std::to_string(total - failing) + "/" + std::to_string(total) + " rows error-free" +
                              (failures.empty() ? "" : ";" + failures)};
}

Outcome mild_isi_degradation() {
    Scenario s;
    s.id = "accept-mild-qpsk";
    s.modulation = Modulation::QPSK;
    s.tau = {9, 10};
    s.alpha = 0.3;
    s.estimators = {EstimatorConfig::mlisic(6, 2)};
    s.snr_db = {6.0, 6.5, 7.0, 7.5};
    s.stop = {2'000'000, 200, 2'000'000};
    s.reference = ReferenceMode::ClosedForm;
    s.seed = 20261014;
    const auto rec = run_scenario(s);
    const auto ref = scenario_reference(s);
    const auto row = degradation_summary(rec, ref, 1e-3).front();
    std::uint64_t min_bits = rec.front().bits;
    for (const auto& r : rec) min_bits = std::min(min_bits, r.bits);
    if (!row.degradation_db) return {false, "curve does not cross BER 1e-3"};
    return {*row.degradation_db < 0.15 && min_bits >= 2'000'000,
            "MLISIC(6,2) degradation " + fmt("%+.3f", *row.degradation_db) + " dB at BER 1e-3 (limit 0.15), " +
                std::to_string(min_bits) + " bits/point"};
}

Outcome estimator_ordering() {
    auto s = preset("table4-16apsk");
    s.seed = 7;
    s.stop = {1'000'000, 0, 1'000'000};
    // Locate the reference BER 1e-3 crossing on a fine Nyquist grid.
    Scenario probe = s;
    probe.snr_db.clear();
    for (double v = 9.0; v <= 13.0 + 1e-9; v += 0.5) probe.snr_db.push_back(v);
    const auto ref = scenario_reference(probe);
    std::vector<double> rs, rb;
    for (const auto& p : ref) {
        rs.push_back(p.snr_db);
        rb.push_back(p.ber);
    }
    const auto at = snr_at_ber(rs, rb, 1e-3);
    if (!at) return {false, "reference curve does not cross 1e-3 on the probe grid"};
    s.snr_db = {*at};
    const auto rec = run_scenario(s);
    // rec order: SSSgbKSE, MLISIC, IMLISIC.
    auto z_worse = [](const BerRecord& a, const BerRecord& b) {
        // Evidence that a's BER exceeds b's (two-proportion z statistic).
        const double na = static_cast<double>(a.bits), nb = static_cast<double>(b.bits);
        const double pooled = static_cast<double>(a.errors + b.errors) / (na + nb);
        const double se = std::sqrt(pooled * (1 - pooled) * (1 / na + 1 / nb));
        return se > 0 ? (a.ber - b.ber) / se : 0.0;
    };
    const double z_im_ml = z_worse(rec[2], rec[1]);
    const double z_ml_gb = z_worse(rec[1], rec[0]);
    constexpr double kOneSided95 = 1.6448536269514722;
    const bool ok = z_im_ml < kOneSided95 && z_ml_gb < kOneSided95;
    return {ok, "16APSK at " + fmt("%.2f", *at) + " dB: SSSgbKSE " + fmt("%.3e", rec[0].ber) + ", MLISIC " +
                    fmt("%.3e", rec[1].ber) + ", IMLISIC " + fmt("%.3e", rec[2].ber) + " (z IM>ML " +
                    fmt("%+.2f", z_im_ml) + ", z ML>GB " + fmt("%+.2f", z_ml_gb) + ", limit 1.645)"};
}

Outcome goback_zero_is_sssse() {
    std::size_t mismatches = 0;
    for (const auto& [tau, alpha] : tau_alpha_grid()) {
        auto cfg = FtnConfig::make(tau, alpha);
        cfg.es_n0_db = 12.0;
        const FtnChain chain(cfg);
        const auto c = build_constellation(Modulation::APSK16);
        Rng rng(derive_seed({tau.p, tau.q, static_cast<std::uint64_t>(alpha * 10)}));
        const auto a = random_symbols(c, 100000, rng.engine()());
        const auto noise = chain.matched_noise(a.size(), rng);
        const auto rx = analytic_receive(a, chain.channel_taps(), std::span<const cplx>(noise));
        const auto taps = chain.taps(8);
        auto e0 = make_estimator(EstimatorConfig::sssse(8), taps, c);
        auto e1 = make_estimator(EstimatorConfig::sssgbkse(8, 0), taps, c);
        const auto d0 = estimate_block(*e0, rx.y);
        const auto d1 = estimate_block(*e1, rx.y);
        for (std::size_t k = 0; k < d0.size(); ++k) mismatches += d0[k] != d1[k];
    }
    return {mismatches == 0, std::to_string(mismatches) + " differing decisions over 6 x 1e5 symbols"};
}

Outcome capacity_properties() {
    CapacityQuery q;
    q.power = 10.0;
    std::string d;
    bool ok = true;
    for (double tau : {0.8, 0.9}) {
        q.tau = tau;
        q.shape = PulseShape::Sinc;
        const double rel = std::abs(ftn_capacity(q) - nyquist_capacity(q)) / nyquist_capacity(q);
        ok = ok && rel < 1e-6;
        d += "sinc tau " + fmt("%.1f", tau) + " rel " + fmt("%.1e", rel) + "; ";
        q.shape = PulseShape::Srrc;
        for (double alpha : {0.3, 0.5}) {
            q.alpha = alpha;
            const double gain = ftn_capacity(q) - nyquist_capacity(q);
            ok = ok && gain > 0.0;
            d += "a" + fmt("%.1f", alpha) + " +" + fmt("%.3f", gain) + " ";
        }
    }
    return {ok, d};
}

Outcome determinism() {
    auto s = preset("table3-qpsk");
    s.seed = 99;
    auto strip = [](std::vector<BerRecord> r) {
        for (auto& x : r) x.seconds = 0.0;
        std::ostringstream os;
        write_csv(os, r);
        return os.str();
    };
    const auto a = strip(run_scenario(s, {1, std::nullopt}));
    const auto b = strip(run_scenario(s, {4, std::nullopt}));
    return {a == b, a == b ? "1-thread and 4-thread CSV identical (" + std::to_string(a.size()) + " bytes)"
                           : "CSV differs between thread counts"};
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

} // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "tap/chain equivalence", 10, tap_chain_equivalence},
        {2, "sinc ISI illustration", 1, fig2_oracle},
        {3, "complexity counters", 5, complexity_equality},
        {4, "length constraints", 1, length_constraints},
        {5, "noiseless recovery", 60, noiseless_recovery},
        {6, "mild-ISI degradation", 300, mild_isi_degradation},
        {7, "estimator ordering", 900, estimator_ordering},
        {8, "go-back K=0 equals SSSSE", 60, goback_zero_is_sssse},
        {9, "capacity properties", 5, capacity_properties},
        {10, "thread-count determinism", 300, determinism},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.pass && in_time;
        failed += !pass;
        std::printf("%s %2d %-26s %s [%.2fs / %.0fs%s]\n", pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs,
                    c.budget_s, in_time ? "" : " OVER BUDGET");
        std::fflush(stdout);
    }
    return std::min(failed, 100);
}
