#include "ftn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>

#include "ftn/chain.hpp"
#include "ftn/rng.hpp"

namespace ftn {

namespace {

struct ShardResult {
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    std::uint64_t symbols = 0;
    OpCount ops{};
};

struct PointSetup {
    const Scenario* scenario;
    const EstimatorConfig* est_cfg;
    const FtnChain* chain;
    const Constellation* constellation;
    const TapVector* channel;
    const TapVector* est_taps;
    std::size_t snr_index;
    bool full_chain;
};

ShardResult simulate_shard(const PointSetup& p, std::uint64_t shard) {
    const Scenario& s = *p.scenario;
    const Constellation& c = *p.constellation;
    Rng rng(derive_seed({s.seed, hash_string(s.id), hash_string(p.est_cfg->id()), p.snr_index, shard}));

    const std::size_t n = s.block_symbols;
    const unsigned k = c.bits_per_symbol();
    std::vector<std::size_t> tx(n);
    std::vector<cplx> symbols(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t label = 0;
        for (unsigned b = 0; b < k; ++b) label = (label << 1) | rng.bit();
        tx[i] = c.index_of_label(label);
        symbols[i] = c.point(tx[i]);
    }

    ReceivedSequence rx;
    if (p.full_chain) {
        auto wave = p.chain->transmit(symbols);
        p.chain->add_awgn(wave, rng);
        rx = p.chain->receive(wave, n);
    } else {
        const auto noise = p.chain->matched_noise(n, rng);
        rx = analytic_receive(symbols, *p.channel, std::span<const cplx>(noise), p.chain->symbol_noise_variance());
    }

    auto est = make_estimator(*p.est_cfg, *p.est_taps, c);
    const auto decided = estimate_block(*est, rx.y);

    ShardResult r;
    r.symbols = n;
    r.bits = static_cast<std::uint64_t>(n) * k;
    for (std::size_t i = 0; i < n; ++i)
        r.errors += static_cast<std::uint64_t>(std::popcount(c.label(tx[i]) ^ c.label(decided[i])));
    r.ops = est->counters();
    return r;
}

// Shards are reduced strictly in index order and the stopping rule is checked
// on each prefix, so the result does not depend on which worker ran what.
ShardResult run_point(const PointSetup& p, const StoppingRule& stop, unsigned threads) {
    ShardResult total;
    std::uint64_t prefix = 0;
    bool finished = false;
    std::map<std::uint64_t, ShardResult> pending;
    std::mutex mu;
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;

    auto absorb = [&](std::uint64_t idx, const ShardResult& r) {
        std::lock_guard lock(mu);
        if (finished) return;
        pending.emplace(idx, r);
        for (auto it = pending.find(prefix); it != pending.end(); it = pending.find(prefix)) {
            total.bits += it->second.bits;
            total.errors += it->second.errors;
            total.symbols += it->second.symbols;
            total.ops.adds += it->second.ops.adds;
            total.ops.mults += it->second.ops.mults;
            pending.erase(it);
            ++prefix;
            if (stop.done(total.bits, total.errors)) {
                finished = true;
                break;
            }
        }
    };
    auto is_finished = [&] {
        std::lock_guard lock(mu);
        return finished || failure != nullptr;
    };
    auto worker = [&] {
        try {
            while (!is_finished()) {
                const auto idx = next.fetch_add(1);
                absorb(idx, simulate_shard(p, idx));
            }
        } catch (...) {
            std::lock_guard lock(mu);
            if (!failure) failure = std::current_exception();
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return total;
}

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

} // namespace

void Scenario::validate() const {
    if (id.empty()) throw ScenarioError("scenario id is empty");
    for (char ch : id)
        if (ch == ',' || ch == '"' || ch == '\n') throw ScenarioError("scenario id must not contain ',', '\"' or newlines");
    tau.validate();
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ScenarioError("alpha must be in (0, 1]");
    if (estimators.empty()) throw ScenarioError("scenario '" + id + "' has no estimators");
    if (snr_db.empty()) throw ScenarioError("scenario '" + id + "' has an empty SNR grid");
    for (double v : snr_db)
        if (std::isnan(v) || v == -std::numeric_limits<double>::infinity())
            throw ScenarioError("SNR grid values must be finite or +inf");
    if (stop.min_bits == 0 && stop.min_errors == 0) throw ScenarioError("stopping rule never simulates anything");
    if (stop.max_bits < stop.min_bits) throw ScenarioError("max_bits is below min_bits");
    if (block_symbols == 0) throw ScenarioError("block_symbols must be positive");
    if (reference == ReferenceMode::ClosedForm && modulation != Modulation::QPSK)
        throw ScenarioError("closed-form reference is only available for QPSK");

    const auto cfg = FtnConfig::make(tau, alpha, order);
    FtnChain chain(cfg);
    const std::size_t full = chain.full_span();
    for (std::size_t i = 0; i < estimators.size(); ++i) {
        const auto& e = estimators[i];
        e.validate();
        for (std::size_t j = 0; j < i; ++j)
            if (estimators[j].id() == e.id()) throw ScenarioError("estimator " + e.id() + " listed twice");
        if (e.max_span() > full)
            throw ScenarioError("estimator " + e.id() + " needs " + std::to_string(e.max_span()) +
                                " taps but the pulse supports " + std::to_string(full));
    }
}

std::pair<double, double> binomial_ci(std::uint64_t errors, std::uint64_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double ph = static_cast<double>(errors) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (ph + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(ph * (1.0 - ph) / n + z2 / (4.0 * n * n)) / denom;
    const double lo = errors == 0 ? 0.0 : std::max(0.0, centre - half);
    const double hi = errors == trials ? 1.0 : std::min(1.0, centre + half);
    return {lo, hi};
}

std::vector<BerRecord> run_scenario(const Scenario& s, const RunOptions& options) {
    s.validate();
    const bool full_chain = options.full_chain.value_or(s.full_chain);
    const unsigned threads = std::max(1u, options.threads);
    const Constellation c = build_constellation(s.modulation);

    std::vector<BerRecord> out;
    for (std::size_t si = 0; si < s.snr_db.size(); ++si) {
        auto cfg = FtnConfig::make(s.tau, s.alpha, s.order);
        cfg.es_n0_db = to_es_n0_db(s.snr_db[si], s.snr_unit, s.modulation);
        const FtnChain chain(cfg);
        const TapVector channel = chain.channel_taps();
        for (const auto& e : s.estimators) {
            const TapVector est_taps = channel.truncated(e.max_span());
            const PointSetup setup{&s, &e, &chain, &c, &channel, &est_taps, si, full_chain};

            const auto t0 = std::chrono::steady_clock::now();
            const ShardResult r = run_point(setup, s.stop, threads);
            const auto t1 = std::chrono::steady_clock::now();

            BerRecord rec;
            rec.scenario = s.id;
            rec.estimator = e.id();
            rec.snr_db = s.snr_db[si];
            rec.bits = r.bits;
            rec.errors = r.errors;
            rec.ber = r.bits ? static_cast<double>(r.errors) / static_cast<double>(r.bits) : 0.0;
            std::tie(rec.ci_lo, rec.ci_hi) = binomial_ci(r.errors, r.bits);
            rec.mults_per_sym = static_cast<double>(r.ops.mults) / static_cast<double>(r.symbols);
            rec.adds_per_sym = static_cast<double>(r.ops.adds) / static_cast<double>(r.symbols);
            rec.seconds = std::chrono::duration<double>(t1 - t0).count();
            out.push_back(std::move(rec));
        }
    }
    return out;
}

std::vector<ReferencePoint> scenario_reference(const Scenario& s) {
    ReferenceOptions opt;
    opt.unit = s.snr_unit;
    opt.stop = s.stop;
    opt.block_symbols = s.block_symbols;
    opt.force_simulation = s.reference == ReferenceMode::NyquistSimulated;
    return theoretical_ber_reference(s.modulation, s.snr_db, derive_seed({s.seed, hash_string(s.id), hash_string("reference")}),
                                     opt);
}

LengthMode natural_length_mode(std::span<const std::size_t> spans) {
    if (validate_lengths(spans.size(), spans, LengthMode::Optimal).valid) return LengthMode::Optimal;
    if (validate_lengths(spans.size(), spans, LengthMode::Simplified).valid) return LengthMode::Simplified;
    return LengthMode::Custom;
}

namespace {

struct TableRow {
    Modulation mod;
    std::size_t gb_span, gb_k;
    std::size_t ml_span, ml_layers;
    std::vector<std::size_t> im_spans;
};

std::vector<double> grid(double from, double to, double step = 1.0) {
    std::vector<double> g;
    for (double v = from; v <= to + 1e-9; v += step) g.push_back(v);
    return g;
}

// Eb/N0 grids spanning roughly 1e-1 down to 1e-5/1e-6 of the ISI-free curve.
std::vector<double> default_grid(Modulation m) {
    switch (m) {
    case Modulation::QPSK: return grid(0, 10);
    case Modulation::PSK8: return grid(3, 14);
    case Modulation::APSK16: return grid(5, 16);
    case Modulation::APSK32: return grid(8, 19);
    case Modulation::APSK64: return grid(10, 22);
    case Modulation::APSK128: return grid(13, 25);
    case Modulation::APSK256: return grid(16, 28);
    }
    return grid(0, 10);
}

Scenario from_row(std::string id, const TableRow& r, Tau tau, double alpha) {
    Scenario s;
    s.id = std::move(id);
    s.modulation = r.mod;
    s.tau = tau;
    s.alpha = alpha;
    s.estimators = {
        EstimatorConfig::sssgbkse(r.gb_span, r.gb_k),
        EstimatorConfig::mlisic(r.ml_span, r.ml_layers),
        EstimatorConfig::imlisic(r.im_spans, natural_length_mode(r.im_spans)),
    };
    s.snr_db = default_grid(r.mod);
    s.snr_unit = SnrUnit::EbN0;
    s.reference = r.mod == Modulation::QPSK ? ReferenceMode::ClosedForm : ReferenceMode::NyquistSimulated;
    return s;
}

const std::vector<TableRow>& table3() {
    static const std::vector<TableRow> rows{
        {Modulation::QPSK, 6, 3, 6, 2, {7, 6}},
        {Modulation::PSK8, 6, 3, 6, 2, {7, 6}},
        {Modulation::APSK16, 6, 3, 6, 2, {7, 6}},
        {Modulation::APSK32, 8, 3, 8, 2, {9, 8}},
        {Modulation::APSK64, 8, 4, 8, 3, {8, 8, 8}},
        {Modulation::APSK128, 8, 5, 8, 4, {8, 8, 8, 8}},
        {Modulation::APSK256, 13, 5, 13, 4, {13, 13, 13, 13}},
    };
    return rows;
}

const std::vector<TableRow>& table4() {
    static const std::vector<TableRow> rows{
        {Modulation::APSK16, 8, 4, 8, 4, {13, 7, 6}},
        {Modulation::APSK32, 8, 5, 8, 5, {10, 9, 8, 7, 6}},
        {Modulation::APSK64, 8, 5, 8, 5, {10, 9, 8, 7, 6}},
        {Modulation::APSK128, 8, 6, 8, 6, {13, 12, 11, 10, 9, 8}},
        {Modulation::APSK256, 8, 6, 8, 6, {13, 12, 11, 10, 9, 8}},
    };
    return rows;
}

const std::vector<TableRow>& table5() {
    static const std::vector<TableRow> rows{
        {Modulation::QPSK, 6, 3, 6, 3, {8, 7, 6}},
        {Modulation::PSK8, 6, 4, 6, 4, {9, 8, 7, 6}},
        {Modulation::APSK16, 8, 4, 8, 4, {25, 13, 7, 6}},
    };
    return rows;
}

std::map<std::string, Scenario> build_presets() {
    std::map<std::string, Scenario> m;
    auto add = [&](Scenario s) { m.emplace(s.id, std::move(s)); };
    for (const auto& r : table3()) add(from_row("table3-" + std::string(to_string(r.mod)), r, {9, 10}, 0.3));
    for (const auto& r : table4()) add(from_row("table4-" + std::string(to_string(r.mod)), r, {4, 5}, 0.5));
    for (const auto& r : table5()) {
        add(from_row("table5-" + std::string(to_string(r.mod)), r, {4, 5}, 0.3));
        add(from_row("table5-" + std::string(to_string(r.mod)) + "-a04", r, {4, 5}, 0.4));
    }
    return m;
}

const std::map<std::string, Scenario>& presets() {
    static const auto m = build_presets();
    return m;
}

constexpr const char* kGridPreset = "table2-grid";

} // namespace

std::vector<std::string> preset_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : presets()) names.push_back(k);
    names.emplace_back(kGridPreset);
    return names;
}

Scenario preset(const std::string& name) {
    const auto it = presets().find(name);
    if (it == presets().end()) {
        std::string msg = "unknown preset '" + name + "'; available:";
        for (const auto& n : preset_names()) msg += " " + n;
        throw ScenarioError(msg);
    }
    return it->second;
}

std::vector<Scenario> preset_group(const std::string& name) {
    if (name != kGridPreset) return {preset(name)};
    std::vector<Scenario> out;
    for (const auto& r : table3()) out.push_back(preset("table3-" + std::string(to_string(r.mod))));
    for (const auto& r : table4()) out.push_back(preset("table4-" + std::string(to_string(r.mod))));
    for (const auto& r : table5()) {
        out.push_back(preset("table5-" + std::string(to_string(r.mod))));
        out.push_back(preset("table5-" + std::string(to_string(r.mod)) + "-a04"));
    }
    return out;
}

std::vector<ComplexityRow> complexity_report(std::span<const EstimatorConfig> configs, bool measure,
                                             std::size_t symbols) {
    std::vector<ComplexityRow> rows;
    for (const auto& cfg : configs) {
        cfg.validate();
        ComplexityRow row;
        row.estimator = cfg.id();
        row.formula = op_count(cfg);
        if (measure && symbols > 0) {
            const auto span = cfg.max_span();
            std::vector<double> taps(span);
            for (std::size_t i = 0; i < span; ++i) taps[i] = 1.0 / static_cast<double>(i + 1);
            const TapVector tv{taps, {4, 5}};
            const Constellation c = build_constellation(Modulation::QPSK);
            Rng rng(derive_seed({hash_string(row.estimator), symbols}));
            std::vector<cplx> y(symbols);
            for (auto& v : y) v = c.point(rng.engine()() % c.size()) + rng.complex_gaussian(0.1);
            auto est = make_estimator(cfg, tv, c);
            (void)estimate_block(*est, y);
            const OpCount total = est->counters();
            const auto n = static_cast<std::uint64_t>(symbols);
            row.measured = OpCount{total.adds / n, total.mults / n};
            row.exact = total.adds % n == 0 && total.mults % n == 0 && *row.measured == row.formula;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::optional<double> snr_at_ber(std::span<const double> snr_db, std::span<const double> ber, double target_ber) {
    if (snr_db.size() != ber.size() || !(target_ber > 0.0)) return std::nullopt;
    const double lt = std::log10(target_ber);
    for (std::size_t i = 0; i + 1 < snr_db.size(); ++i) {
        const double b0 = ber[i], b1 = ber[i + 1];
        if (!(b0 > 0.0) || !(b1 > 0.0)) continue;
        if ((b0 - target_ber) * (b1 - target_ber) > 0.0) continue;
        const double l0 = std::log10(b0), l1 = std::log10(b1);
        if (l0 == l1) return snr_db[i];
        return snr_db[i] + (lt - l0) * (snr_db[i + 1] - snr_db[i]) / (l1 - l0);
    }
    return std::nullopt;
}

std::vector<DegradationRow> degradation_summary(std::span<const BerRecord> records,
                                                std::span<const ReferencePoint> reference, double target_ber) {
    std::vector<double> rs, rb;
    for (const auto& p : reference) {
        rs.push_back(p.snr_db);
        rb.push_back(p.ber);
    }
    const auto ref_snr = snr_at_ber(rs, rb, target_ber);

    std::vector<std::string> order;
    for (const auto& r : records)
        if (std::find(order.begin(), order.end(), r.estimator) == order.end()) order.push_back(r.estimator);

    std::vector<DegradationRow> out;
    for (const auto& name : order) {
        std::vector<double> s, b;
        for (const auto& r : records)
            if (r.estimator == name) {
                s.push_back(r.snr_db);
                b.push_back(r.ber);
            }
        DegradationRow row;
        row.estimator = name;
        row.snr_estimator = snr_at_ber(s, b, target_ber);
        row.snr_reference = ref_snr;
        if (row.snr_estimator && ref_snr) row.degradation_db = *row.snr_estimator - *ref_snr;
        out.push_back(std::move(row));
    }
    return out;
}

void write_csv(std::ostream& out, std::span<const BerRecord> records, bool with_header) {
    if (with_header) out << kCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.scenario << ',' << r.estimator << ',' << fmt("%.4f", r.snr_db) << ',' << r.bits << ',' << r.errors
            << ',' << fmt("%.6e", r.ber) << ',' << fmt("%.6e", r.ci_lo) << ',' << fmt("%.6e", r.ci_hi) << ','
            << fmt("%.6g", r.mults_per_sym) << ',' << fmt("%.6g", r.adds_per_sym) << ',' << fmt("%.3f", r.seconds)
            << '\n';
    }
}

void write_reference_csv(std::ostream& out, std::string_view scenario, std::span<const ReferencePoint> ref) {
    out << "scenario,snr_db,bits,errors,ber,closed_form\n";
    for (const auto& p : ref)
        out << scenario << ',' << fmt("%.4f", p.snr_db) << ',' << p.bits << ',' << p.errors << ','
            << fmt("%.6e", p.ber) << ',' << (p.closed_form ? 1 : 0) << '\n';
}

void write_summary(std::ostream& out, const Scenario& s, std::span<const BerRecord> records,
                   std::span<const ReferencePoint> reference, std::span<const double> targets) {
    out << "scenario " << s.id << ": " << to_string(s.modulation) << ", tau " << s.tau.p << "/" << s.tau.q
        << ", alpha " << s.alpha << ", snr axis " << (s.snr_unit == SnrUnit::EbN0 ? "Eb/N0" : "Es/N0") << "\n";
    for (double t : targets) {
        out << "  target BER " << fmt("%.0e", t) << "\n";
        for (const auto& row : degradation_summary(records, reference, t)) {
            out << "    " << row.estimator << ": ";
            if (row.degradation_db)
                out << "degradation " << fmt("%+.3f", *row.degradation_db) << " dB (at " << fmt("%.3f", *row.snr_estimator)
                    << " dB vs " << fmt("%.3f", *row.snr_reference) << " dB)\n";
            else if (!row.snr_reference)
                out << "reference curve does not cross the target\n";
            else
                out << "curve does not cross the target\n";
        }
    }
}

} // namespace ftn
