#include "ftn/estimators.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <numeric>
#include <sstream>

namespace ftn {

std::string_view to_string(EstimatorKind kind) {
    switch (kind) {
    case EstimatorKind::SSSSE: return "SSSSE";
    case EstimatorKind::SSSGBKSE: return "SSSgbKSE";
    case EstimatorKind::MLISIC: return "MLISIC";
    case EstimatorKind::IMLISIC: return "IMLISIC";
    }
    return "unknown";
}

std::string_view to_string(LengthMode mode) {
    switch (mode) {
    case LengthMode::Optimal: return "optimal";
    case LengthMode::Simplified: return "simplified";
    case LengthMode::Custom: return "custom";
    }
    return "unknown";
}

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return out;
}

} // namespace

std::optional<EstimatorKind> parse_estimator_kind(std::string_view name) {
    const auto n = lowercase(name);
    if (n == "sssse") return EstimatorKind::SSSSE;
    if (n == "sssgbkse" || n == "gobackk" || n == "go-back") return EstimatorKind::SSSGBKSE;
    if (n == "mlisic") return EstimatorKind::MLISIC;
    if (n == "imlisic") return EstimatorKind::IMLISIC;
    return std::nullopt;
}

std::optional<LengthMode> parse_length_mode(std::string_view name) {
    const auto n = lowercase(name);
    if (n == "optimal") return LengthMode::Optimal;
    if (n == "simplified") return LengthMode::Simplified;
    if (n == "custom") return LengthMode::Custom;
    return std::nullopt;
}

EstimatorConfig EstimatorConfig::sssse(std::size_t span) {
    EstimatorConfig c;
    c.kind = EstimatorKind::SSSSE;
    c.span = span;
    return c;
}

EstimatorConfig EstimatorConfig::sssgbkse(std::size_t span, std::size_t go_back) {
    EstimatorConfig c;
    c.kind = EstimatorKind::SSSGBKSE;
    c.span = span;
    c.go_back = go_back;
    return c;
}

EstimatorConfig EstimatorConfig::mlisic(std::size_t span, std::size_t layers) {
    EstimatorConfig c;
    c.kind = EstimatorKind::MLISIC;
    c.span = span;
    c.layers = layers;
    return c;
}

EstimatorConfig EstimatorConfig::imlisic(std::vector<std::size_t> spans, LengthMode mode) {
    EstimatorConfig c;
    c.kind = EstimatorKind::IMLISIC;
    c.layers = spans.size();
    c.spans = std::move(spans);
    c.span = c.spans.empty() ? 0 : *std::max_element(c.spans.begin(), c.spans.end());
    c.mode = mode;
    return c;
}

std::size_t EstimatorConfig::max_span() const {
    if (kind == EstimatorKind::IMLISIC)
        return spans.empty() ? 0 : *std::max_element(spans.begin(), spans.end());
    return span;
}

void EstimatorConfig::validate() const {
    switch (kind) {
    case EstimatorKind::SSSSE:
        if (span < 1) throw EstimatorConfigError("SSSSE needs L >= 1");
        break;
    case EstimatorKind::SSSGBKSE:
        if (span < 1) throw EstimatorConfigError("SSSgbKSE needs L >= 1");
        if (go_back > span - 1)
            throw EstimatorConfigError("SSSgbKSE needs K <= L-1, got K=" + std::to_string(go_back) +
                                       " L=" + std::to_string(span));
        break;
    case EstimatorKind::MLISIC:
        if (span < 1) throw EstimatorConfigError("MLISIC needs L >= 1");
        if (layers < 1) throw EstimatorConfigError("MLISIC needs K_E >= 1");
        break;
    case EstimatorKind::IMLISIC: {
        const auto report = validate_lengths(layers, spans, mode);
        if (!report.valid) {
            std::string msg = "IMLISIC length constraint violated (" + std::string(to_string(mode)) + "):";
            for (const auto& v : report.violations) msg += " " + v + ";";
            throw EstimatorConfigError(msg);
        }
        break;
    }
    }
}

std::string EstimatorConfig::id() const {
    std::ostringstream os;
    os << to_string(kind);
    switch (kind) {
    case EstimatorKind::SSSSE: os << "_L" << span; break;
    case EstimatorKind::SSSGBKSE: os << "_L" << span << "_K" << go_back; break;
    case EstimatorKind::MLISIC: os << "_L" << span << "_KE" << layers; break;
    case EstimatorKind::IMLISIC:
        os << "_L";
        for (std::size_t i = 0; i < spans.size(); ++i) os << (i ? "-" : "") << spans[i];
        os << "_KE" << layers;
        break;
    }
    return os.str();
}

OpCount op_count(const EstimatorConfig& cfg) {
    std::uint64_t n = 0;
    const std::uint64_t l1 = cfg.span > 0 ? cfg.span - 1 : 0;
    switch (cfg.kind) {
    case EstimatorKind::SSSSE: n = l1; break;
    case EstimatorKind::SSSGBKSE: {
        const std::uint64_t k = cfg.go_back;
        n = (k + 2) * l1 + k * (k + 1) / 2;
        break;
    }
    case EstimatorKind::MLISIC: n = 2 * cfg.layers * l1; break;
    case EstimatorKind::IMLISIC:
        for (auto l : cfg.spans) n += 2 * (l - 1);
        break;
    }
    return {n, n};
}

LengthReport validate_lengths(std::size_t layers, std::span<const std::size_t> spans, LengthMode mode) {
    LengthReport r;
    if (layers < 1 || spans.size() != layers) {
        r.valid = false;
        r.violations.push_back("need " + std::to_string(layers) + " spans, got " + std::to_string(spans.size()));
        return r;
    }
    bool shape_ok = true;
    for (std::size_t i = 0; i < layers; ++i) {
        if (spans[i] < 2) {
            shape_ok = false;
            r.violations.push_back("L_" + std::to_string(i + 1) + " = " + std::to_string(spans[i]) + " < 2");
        }
    }
    if (!shape_ok) {
        r.valid = false;
        return r;
    }

    // 1-based views: L(i) = spans[i-1].
    auto L = [&](std::size_t i) { return spans[i - 1]; };
    const std::size_t last = L(layers);

    std::vector<std::string> optimal_misses;
    for (std::size_t k = 1; k + 1 <= layers; ++k) {
        const std::size_t need = (std::size_t{1} << (k - 1)) * last + 1;
        if (L(layers - k) < need)
            optimal_misses.push_back("L_" + std::to_string(layers - k) + " = " + std::to_string(L(layers - k)) +
                                     " < " + std::to_string(need));
    }
    r.optimal = optimal_misses.empty();

    std::vector<std::string> simplified_misses;
    for (std::size_t i = 2; i <= layers; ++i) {
        if (L(i - 1) != L(i) + 1)
            simplified_misses.push_back("L_" + std::to_string(i - 1) + " = " + std::to_string(L(i - 1)) +
                                        " != L_" + std::to_string(i) + " + 1");
    }
    r.simplified = simplified_misses.empty();

    for (std::size_t a = 2; a <= layers; ++a) {
        for (std::size_t b = 1; b < a; ++b) {
            std::size_t reach = 1;
            for (std::size_t i = b + 1; i <= a; ++i) reach += L(i) - 1;
            if (L(b) - 1 >= reach) r.contributions.push_back({a, b});
        }
    }

    switch (mode) {
    case LengthMode::Optimal:
        r.valid = r.optimal;
        r.violations = optimal_misses;
        break;
    case LengthMode::Simplified:
        r.valid = r.simplified;
        r.violations = simplified_misses;
        break;
    case LengthMode::Custom:
        r.valid = true;
        for (const auto& m : optimal_misses) r.warnings.push_back("not optimal: " + m);
        break;
    }
    return r;
}

// --- SymbolEstimator ---------------------------------------------------------

SymbolEstimator::History::History(std::size_t min_capacity) {
    const std::size_t cap = std::bit_ceil(std::max<std::size_t>(min_capacity, 2));
    buf_.assign(cap, cplx{});
    mask_ = cap - 1;
}

void SymbolEstimator::History::clear() { std::fill(buf_.begin(), buf_.end(), cplx{}); }

SymbolEstimator::SymbolEstimator(EstimatorConfig cfg, TapVector taps, const Constellation& c, std::size_t delay)
    : cfg_(std::move(cfg)), taps_(std::move(taps)), constellation_(&c), delay_(delay) {
    cfg_.validate();
    if (taps_.span() < cfg_.max_span())
        throw EstimatorConfigError("tap vector has span " + std::to_string(taps_.span()) + ", estimator needs " +
                                   std::to_string(cfg_.max_span()));
    rx_ = History(capacity_hint());
}

std::size_t SymbolEstimator::capacity_hint() const { return delay_ + 2 * cfg_.max_span() + 2; }

std::int64_t SymbolEstimator::push_received(cplx y) {
    const std::int64_t k = steps_++;
    rx_.set(k, k < end_ ? y : cplx{});
    return k;
}

std::size_t SymbolEstimator::decide(cplx acc, std::size_t layer, std::int64_t idx) {
    const std::size_t p = constellation_->decide(acc);
    if (trace_) {
        const auto& v = constellation_->point(p);
        *trace_ << (steps_ - 1) << ',' << layer << ',' << idx << ',' << v.real() << ',' << v.imag() << '\n';
    }
    return p;
}

std::vector<Decision> SymbolEstimator::finish() {
    end_ = steps_;
    std::vector<Decision> out;
    for (std::size_t i = 0; i < delay_; ++i)
        if (auto d = step(cplx{})) out.push_back(*d);
    return out;
}

void SymbolEstimator::reset() {
    steps_ = 0;
    end_ = std::numeric_limits<std::int64_t>::max();
    ops_ = {};
    rx_.clear();
    clear_state();
}

// --- SSSSE -------------------------------------------------------------------

SssseEstimator::SssseEstimator(EstimatorConfig cfg, TapVector taps, const Constellation& c)
    : SymbolEstimator(std::move(cfg), std::move(taps), c, 0), est_(capacity_hint()) {}

void SssseEstimator::clear_state() { est_.clear(); }

std::optional<Decision> SssseEstimator::step(cplx y) {
    const std::int64_t k = push_received(y);
    if (k >= end_) return std::nullopt;
    const auto span = static_cast<std::int64_t>(cfg_.span);
    cplx acc = y;
    for (std::int64_t i = 1; i < span; ++i) {
        acc -= taps_[static_cast<std::size_t>(i)] * est_.get(k - i, end_);
        ++ops_.mults;
        ++ops_.adds;
    }
    const std::size_t p = decide(acc, 1, k);
    est_.set(k, constellation_->point(p));
    return Decision{k, p};
}

// --- SSSgbKSE ----------------------------------------------------------------

GoBackEstimator::GoBackEstimator(EstimatorConfig cfg, TapVector taps, const Constellation& c)
    : SymbolEstimator(std::move(cfg), std::move(taps), c, 0), est_(1) {
    delay_ = cfg_.go_back;
    const std::size_t cap = capacity_hint();
    rx_ = History(cap);
    est_ = History(cap);
    point_.assign(std::bit_ceil(std::max<std::size_t>(cap, 2)), 0);
    point_mask_ = point_.size() - 1;
}

void GoBackEstimator::clear_state() {
    est_.clear();
    std::fill(point_.begin(), point_.end(), 0);
}

std::optional<Decision> GoBackEstimator::step(cplx y) {
    const std::int64_t k = push_received(y);
    const auto span = static_cast<std::int64_t>(cfg_.span);
    const auto go_back = static_cast<std::int64_t>(cfg_.go_back);

    auto causal = [&](std::int64_t j) {
        cplx acc = received(j);
        for (std::int64_t i = 1; i < span; ++i) {
            acc -= taps_[static_cast<std::size_t>(i)] * est_.get(j - i, end_);
            ++ops_.mults;
            ++ops_.adds;
        }
        return acc;
    };
    auto store = [&](std::int64_t j, std::size_t p) {
        est_.set(j, constellation_->point(p));
        point_[static_cast<std::size_t>(j) & point_mask_] = p;
    };

    // First estimate of the newest symbol.
    if (k < end_) store(k, decide(causal(k), 1, k));

    // Go back over k-1 .. k-K, newest first. The right-hand side uses the
    // symbols re-estimated earlier in this step and the first estimate of a_k.
    for (std::int64_t back = 1; back <= go_back; ++back) {
        const std::int64_t j = k - back;
        if (j < 0) break;
        if (j >= end_) continue;
        cplx acc = causal(j);
        for (std::int64_t i = 1; i <= back; ++i) {
            acc -= taps_[static_cast<std::size_t>(i)] * est_.get(j + i, end_);
            ++ops_.mults;
            ++ops_.adds;
        }
        store(j, decide(acc, static_cast<std::size_t>(back) + 1, j));
    }

    // Re-estimate the newest symbol against the revised history.
    if (k < end_) store(k, decide(causal(k), static_cast<std::size_t>(go_back) + 2, k));

    const std::int64_t out = k - go_back;
    if (out < 0 || out >= end_) return std::nullopt;
    return Decision{out, point_[static_cast<std::size_t>(out) & point_mask_]};
}

// --- MLISIC ------------------------------------------------------------------

MlisicEstimator::MlisicEstimator(EstimatorConfig cfg, TapVector taps, const Constellation& c)
    : SymbolEstimator(std::move(cfg), std::move(taps), c, 0) {
    delay_ = cfg_.layers * (cfg_.span - 1);
    rx_ = History(capacity_hint());
    layers_.assign(cfg_.layers, History(capacity_hint()));
}

void MlisicEstimator::clear_state() {
    for (auto& l : layers_) l.clear();
}

std::optional<Decision> MlisicEstimator::step(cplx y) {
    const std::int64_t k = push_received(y);
    const auto reach = static_cast<std::int64_t>(cfg_.span) - 1;
    std::optional<Decision> out;
    for (std::size_t m = 0; m < layers_.size(); ++m) {
        const std::int64_t j = k - static_cast<std::int64_t>(m + 1) * reach;
        if (j < 0) break;
        if (j >= end_) continue;
        cplx acc = received(j);
        for (std::int64_t i = 1; i <= reach; ++i) {
            const double g = taps_[static_cast<std::size_t>(i)];
            const cplx left = m == 0 ? received(j - i) : layers_[m - 1].get(j - i, end_);
            const cplx right = m == 0 ? received(j + i) : layers_[m - 1].get(j + i, end_);
            acc -= g * left;
            acc -= g * right;
            ops_.mults += 2;
            ops_.adds += 2;
        }
        const std::size_t p = decide(acc, m + 1, j);
        layers_[m].set(j, constellation_->point(p));
        if (m + 1 == layers_.size()) out = Decision{j, p};
    }
    return out;
}

// --- IMLISIC -----------------------------------------------------------------

ImlisicEstimator::ImlisicEstimator(EstimatorConfig cfg, TapVector taps, const Constellation& c)
    : SymbolEstimator(std::move(cfg), std::move(taps), c, 0) {
    std::size_t acc = 0;
    for (auto l : cfg_.spans) {
        acc += l - 1;
        offsets_.push_back(acc);
    }
    delay_ = acc;
    updates_ = validate_lengths(cfg_.layers, cfg_.spans, cfg_.mode).contributions;
    rx_ = History(capacity_hint());
    layers_.assign(cfg_.layers, History(capacity_hint()));
}

void ImlisicEstimator::clear_state() {
    for (auto& l : layers_) l.clear();
}

std::optional<Decision> ImlisicEstimator::step(cplx y) {
    const std::int64_t k = push_received(y);
    std::optional<Decision> out;
    for (std::size_t m = 0; m < layers_.size(); ++m) {
        const std::int64_t j = k - static_cast<std::int64_t>(offsets_[m]);
        if (j < 0) break;
        if (j >= end_) continue;
        const auto reach = static_cast<std::int64_t>(cfg_.spans[m]) - 1;
        cplx acc = received(j);
        for (std::int64_t i = 1; i <= reach; ++i) {
            const double g = taps_[static_cast<std::size_t>(i)];
            const cplx left = layers_[m].get(j - i, end_);
            const cplx right = m == 0 ? received(j + i) : layers_[m - 1].get(j + i, end_);
            acc -= g * left;
            acc -= g * right;
            ops_.mults += 2;
            ops_.adds += 2;
        }
        const std::size_t p = decide(acc, m + 1, j);
        const cplx v = constellation_->point(p);
        layers_[m].set(j, v);
        for (const auto& u : updates_)
            if (u.from_layer == m + 1) layers_[u.to_layer - 1].set(j, v);
        if (m + 1 == layers_.size()) out = Decision{j, p};
    }
    return out;
}

std::unique_ptr<SymbolEstimator> make_estimator(const EstimatorConfig& cfg, const TapVector& taps,
                                                const Constellation& c) {
    switch (cfg.kind) {
    case EstimatorKind::SSSSE: return std::make_unique<SssseEstimator>(cfg, taps, c);
    case EstimatorKind::SSSGBKSE: return std::make_unique<GoBackEstimator>(cfg, taps, c);
    case EstimatorKind::MLISIC: return std::make_unique<MlisicEstimator>(cfg, taps, c);
    case EstimatorKind::IMLISIC: return std::make_unique<ImlisicEstimator>(cfg, taps, c);
    }
    throw EstimatorConfigError("unknown estimator kind");
}

std::vector<std::size_t> estimate_block(SymbolEstimator& est, std::span<const cplx> y) {
    std::vector<std::size_t> out(y.size(), 0);
    auto put = [&](const Decision& d) { out[static_cast<std::size_t>(d.index)] = d.point; };
    for (const auto& s : y)
        if (auto d = est.step(s)) put(*d);
    for (const auto& d : est.finish()) put(d);
    return out;
}

} // namespace ftn
