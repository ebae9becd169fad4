#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftn/constellation.hpp"
#include "ftn/estimators.hpp"
#include "ftn/pulse.hpp"
#include "ftn/reference.hpp"

namespace ftn {

class ScenarioError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

enum class ReferenceMode { ClosedForm, NyquistSimulated };

struct Scenario {
    std::string id = "scenario";
    Modulation modulation = Modulation::QPSK;
    Tau tau{9, 10};
    double alpha = 0.3;
    std::size_t order = 201;
    std::vector<EstimatorConfig> estimators;
    std::vector<double> snr_db;
    SnrUnit snr_unit = SnrUnit::EbN0;
    StoppingRule stop{};
    std::uint64_t seed = 1;
    ReferenceMode reference = ReferenceMode::NyquistSimulated;
    std::size_t block_symbols = 4096;
    bool full_chain = false;

    // Throws ScenarioError (or the estimator's config error) before any
    // simulation work starts.
    void validate() const;
};

struct BerRecord {
    std::string scenario;
    std::string estimator;
    double snr_db = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    double ber = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double mults_per_sym = 0.0;
    double adds_per_sym = 0.0;
    double seconds = 0.0;
};

struct RunOptions {
    unsigned threads = 1;
    std::optional<bool> full_chain;
};

// 95% Wilson score interval for a binomial proportion.
std::pair<double, double> binomial_ci(std::uint64_t errors, std::uint64_t trials, double z = 1.959963984540054);

std::vector<BerRecord> run_scenario(const Scenario& s, const RunOptions& options = {});
std::vector<ReferencePoint> scenario_reference(const Scenario& s);

// Frozen parameter rows of the simulation tables.
std::vector<std::string> preset_names();
Scenario preset(const std::string& name);
// "table2-grid" expands to every simulated case; any single preset name
// expands to itself.
std::vector<Scenario> preset_group(const std::string& name);

// Optimal if it holds, else Simplified, else Custom.
LengthMode natural_length_mode(std::span<const std::size_t> spans);

struct ComplexityRow {
    std::string estimator;
    OpCount formula;
    std::optional<OpCount> measured;   // per symbol, from an instrumented run
    bool exact = false;                // measured total divisible and equal
};

std::vector<ComplexityRow> complexity_report(std::span<const EstimatorConfig> configs, bool measure = true,
                                             std::size_t symbols = 2000);

// SNR at which a curve crosses target_ber, linear in log10(BER). Needs a
// bracketing pair of strictly positive BER points.
std::optional<double> snr_at_ber(std::span<const double> snr_db, std::span<const double> ber, double target_ber);

struct DegradationRow {
    std::string estimator;
    std::optional<double> snr_estimator;
    std::optional<double> snr_reference;
    std::optional<double> degradation_db;
};

std::vector<DegradationRow> degradation_summary(std::span<const BerRecord> records,
                                                std::span<const ReferencePoint> reference, double target_ber);

inline constexpr const char* kCsvHeader =
    "scenario,estimator,snr_db,bits,errors,ber,ci_lo,ci_hi,mults_per_sym,adds_per_sym,seconds";

void write_csv(std::ostream& out, std::span<const BerRecord> records, bool with_header = true);
void write_reference_csv(std::ostream& out, std::string_view scenario, std::span<const ReferencePoint> ref);
void write_summary(std::ostream& out, const Scenario& s, std::span<const BerRecord> records,
                   std::span<const ReferencePoint> reference, std::span<const double> targets);

// Structured-text (JSON) form of a Scenario.
Scenario scenario_from_json_text(std::string_view text);
std::string scenario_to_json_text(const Scenario& s);
Scenario load_scenario_file(const std::filesystem::path& path);

} // namespace ftn
