#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftn/constellation.hpp"
#include "ftn/pulse.hpp"

namespace ftn {

class EstimatorConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

enum class EstimatorKind { SSSSE, SSSGBKSE, MLISIC, IMLISIC };

// How IMLISIC layer spans are checked: Optimal (exponential growth towards
// the first layer), Simplified (each earlier layer one longer), or Custom
// (anything with L_i >= 2, reported but not rejected).
enum class LengthMode { Optimal, Simplified, Custom };

std::string_view to_string(EstimatorKind kind);
std::string_view to_string(LengthMode mode);
std::optional<EstimatorKind> parse_estimator_kind(std::string_view name);
std::optional<LengthMode> parse_length_mode(std::string_view name);

struct EstimatorConfig {
    EstimatorKind kind = EstimatorKind::SSSSE;
    std::size_t span = 1;              // L
    std::size_t go_back = 0;           // K
    std::size_t layers = 1;            // K_E
    std::vector<std::size_t> spans;    // [L_1 .. L_KE]
    LengthMode mode = LengthMode::Custom;

    static EstimatorConfig sssse(std::size_t span);
    static EstimatorConfig sssgbkse(std::size_t span, std::size_t go_back);
    static EstimatorConfig mlisic(std::size_t span, std::size_t layers);
    static EstimatorConfig imlisic(std::vector<std::size_t> spans, LengthMode mode);

    // Throws EstimatorConfigError. Custom-mode length issues only warn.
    void validate() const;
    std::size_t max_span() const;
    // Stable identifier, e.g. "MLISIC_L6_KE2" or "IMLISIC_L7-6_KE2".
    std::string id() const;
};

struct OpCount {
    std::uint64_t adds = 0;
    std::uint64_t mults = 0;
    friend bool operator==(const OpCount&, const OpCount&) = default;
};

// Per-symbol additions/multiplications of the complexity table.
OpCount op_count(const EstimatorConfig& cfg);

struct Contribution {
    std::size_t from_layer;   // iteration whose newest output is copied
    std::size_t to_layer;     // earlier iteration that reads it next
};

struct LengthReport {
    bool valid = true;
    bool optimal = false;
    bool simplified = false;
    std::vector<Contribution> contributions;
    std::vector<std::string> violations;
    std::vector<std::string> warnings;
};

// Optimal: L_{KE-k} >= 2^(k-1) L_KE + 1, 1 <= k <= KE-1.
// Simplified: L_{i-1} = L_i + 1.
// Contributions: pairs (a, b), b < a, with L_b - 1 >= sum_{i=b+1..a}(L_i - 1) + 1.
LengthReport validate_lengths(std::size_t layers, std::span<const std::size_t> spans, LengthMode mode);

struct Decision {
    std::int64_t index = 0;   // input symbol index
    std::size_t point = 0;    // constellation point index
};

// Streaming hard-decision ISI canceller. One received sample per step();
// a decision is emitted once no later step can revise it. finish() marks the
// end of the block (later indices are zero symbols) and drains the rest.
class SymbolEstimator {
  public:
    virtual ~SymbolEstimator() = default;

    virtual std::optional<Decision> step(cplx y) = 0;
    std::vector<Decision> finish();
    void reset();

    std::size_t delay() const { return delay_; }
    const OpCount& counters() const { return ops_; }
    const EstimatorConfig& config() const { return cfg_; }

    // CSV rows "step,layer,index,re,im" for every estimation event.
    void set_trace(std::ostream* out) { trace_ = out; }

  protected:
    SymbolEstimator(EstimatorConfig cfg, TapVector taps, const Constellation& c, std::size_t delay);

    // Ring of values addressed by absolute symbol index. Indices before the
    // stream start or at/after the block end read as zero symbols.
    class History {
      public:
        explicit History(std::size_t min_capacity = 0);
        cplx get(std::int64_t idx, std::int64_t end) const {
            if (idx < 0 || idx >= end) return {};
            return buf_[static_cast<std::size_t>(idx) & mask_];
        }
        void set(std::int64_t idx, cplx v) { buf_[static_cast<std::size_t>(idx) & mask_] = v; }
        void clear();

      private:
        std::vector<cplx> buf_;
        std::size_t mask_ = 0;
    };

    virtual void clear_state() = 0;

    // deci(acc) with trace output.
    std::size_t decide(cplx acc, std::size_t layer, std::int64_t idx);
    std::size_t capacity_hint() const;

    cplx received(std::int64_t idx) const { return rx_.get(idx, end_); }
    std::int64_t push_received(cplx y);

    EstimatorConfig cfg_;
    TapVector taps_;
    const Constellation* constellation_;
    std::size_t delay_ = 0;
    OpCount ops_{};
    std::int64_t steps_ = 0;
    std::int64_t end_ = std::numeric_limits<std::int64_t>::max();
    History rx_;
    std::ostream* trace_ = nullptr;
};

// deci(y_k - sum_{i=2..L} G_{1,i} a_{k-i+1}); zero added delay.
class SssseEstimator final : public SymbolEstimator {
  public:
    SssseEstimator(EstimatorConfig cfg, TapVector taps, const Constellation& c);
    std::optional<Decision> step(cplx y) override;

  private:
    void clear_state() override;
    History est_;
};

// SSSSE first pass, then go-back re-estimation of the previous K symbols
// (newest first), then a re-estimate of the current one. Emits index k-K.
class GoBackEstimator final : public SymbolEstimator {
  public:
    GoBackEstimator(EstimatorConfig cfg, TapVector taps, const Constellation& c);
    std::optional<Decision> step(cplx y) override;

  private:
    void clear_state() override;
    History est_;
    std::vector<std::size_t> point_;   // latest point index per symbol, ring addressed
    std::size_t point_mask_ = 0;
};

// Layer 1 cancels both sides using received samples; layer m >= 2 uses
// layer m-1 decisions on both sides. Delay K_E (L-1).
class MlisicEstimator final : public SymbolEstimator {
  public:
    MlisicEstimator(EstimatorConfig cfg, TapVector taps, const Constellation& c);
    std::optional<Decision> step(cplx y) override;

  private:
    void clear_state() override;
    std::vector<History> layers_;
};

// Each layer uses its own past decisions on the left and the previous layer
// (received samples for layer 1) on the right; newest outputs overwrite the
// same index in earlier layers where the contribution condition holds.
// Delay sum_i (L_i - 1).
class ImlisicEstimator final : public SymbolEstimator {
  public:
    ImlisicEstimator(EstimatorConfig cfg, TapVector taps, const Constellation& c);
    std::optional<Decision> step(cplx y) override;

    const std::vector<Contribution>& contributions() const { return updates_; }

  private:
    void clear_state() override;
    std::vector<History> layers_;
    std::vector<std::size_t> offsets_;   // offsets_[m] = sum_{i<=m} (L_i - 1)
    std::vector<Contribution> updates_;
};

std::unique_ptr<SymbolEstimator> make_estimator(const EstimatorConfig& cfg, const TapVector& taps,
                                                const Constellation& c);

// Feeds a whole block then drains; returns one decision per input index.
std::vector<std::size_t> estimate_block(SymbolEstimator& est, std::span<const cplx> y);

} // namespace ftn
