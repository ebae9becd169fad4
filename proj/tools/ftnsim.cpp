#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "ftn/capacity.hpp"
#include "ftn/chain.hpp"
#include "ftn/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

ftn::Tau parse_tau(const std::string& text) {
    const auto slash = text.find('/');
    if (slash == std::string::npos) throw ftn::ScenarioError("tau must be written P/Q, e.g. 9/10");
    try {
        return {static_cast<std::uint32_t>(std::stoul(text.substr(0, slash))),
                static_cast<std::uint32_t>(std::stoul(text.substr(slash + 1)))};
    } catch (const std::logic_error&) {
        throw ftn::ScenarioError("cannot parse tau '" + text + "'");
    }
}

ftn::Modulation parse_mod(const std::string& text) {
    const auto m = ftn::parse_modulation(text);
    if (!m) throw ftn::ScenarioError("unknown modulation '" + text + "'");
    return *m;
}

struct RunArgs {
    std::string preset;
    std::string config;
    std::optional<std::uint64_t> seed;
    std::vector<double> snr;
    std::optional<std::uint64_t> min_bits;
    std::optional<std::uint64_t> min_errors;
    std::optional<std::uint64_t> max_bits;
    bool full_chain = false;
    std::string out = "results";
    unsigned threads = 0;
    bool quiet = false;
};

int cmd_run(const RunArgs& a) {
    if (a.preset.empty() == a.config.empty()) throw ftn::ScenarioError("run needs exactly one of --preset or --config");
    std::vector<ftn::Scenario> scenarios =
        a.preset.empty() ? std::vector{ftn::load_scenario_file(a.config)} : ftn::preset_group(a.preset);
    for (auto& s : scenarios) {
        if (a.seed) s.seed = *a.seed;
        if (!a.snr.empty()) s.snr_db = a.snr;
        if (a.min_bits) s.stop.min_bits = *a.min_bits;
        if (a.min_errors) s.stop.min_errors = *a.min_errors;
        if (a.max_bits) s.stop.max_bits = *a.max_bits;
        else s.stop.max_bits = std::max(s.stop.max_bits, s.stop.min_bits);
        if (a.full_chain) s.full_chain = true;
        s.validate();
    }

    const unsigned threads = a.threads ? a.threads : std::max(1u, std::thread::hardware_concurrency());
    std::filesystem::create_directories(a.out);
    const std::vector<double> targets{1e-3, 1e-5};
    for (const auto& s : scenarios) {
        if (!a.quiet) std::cerr << "running " << s.id << " (" << s.estimators.size() << " estimators, "
                                << s.snr_db.size() << " SNR points, " << threads << " threads)\n";
        const auto records = ftn::run_scenario(s, {threads, std::nullopt});
        const auto reference = ftn::scenario_reference(s);
        const auto base = std::filesystem::path(a.out) / s.id;
        {
            std::ofstream f(base.string() + ".csv");
            ftn::write_csv(f, records);
        }
        {
            std::ofstream f(base.string() + "_reference.csv");
            ftn::write_reference_csv(f, s.id, reference);
        }
        {
            std::ofstream f(base.string() + "_summary.txt");
            ftn::write_summary(f, s, records, reference, targets);
        }
        if (!a.quiet) ftn::write_summary(std::cout, s, records, reference, targets);
    }
    return 0;
}

int cmd_presets(bool show) {
    for (const auto& name : ftn::preset_names()) {
        if (!show) {
            std::cout << name << '\n';
            continue;
        }
        for (const auto& s : ftn::preset_group(name)) {
            if (name == "table2-grid") {
                std::cout << name << " -> " << s.id << '\n';
                continue;
            }
            std::cout << ftn::scenario_to_json_text(s) << '\n';
        }
    }
    return 0;
}

int cmd_taps(const std::string& tau_text, double alpha, std::size_t order, std::size_t span, bool sinc) {
    const auto tau = parse_tau(tau_text);
    auto cfg = ftn::FtnConfig::make(tau, alpha, order);
    if (sinc) cfg.shape = ftn::PulseShape::Sinc;
    const ftn::FtnChain chain(cfg);
    const std::size_t n = span ? span : chain.full_span();
    const auto taps = chain.taps(n);
    std::cout << "n,tap\n";
    for (std::size_t i = 0; i < taps.span(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%zu,%.12g\n", i, taps[i]);
        std::cout << buf;
    }
    return 0;
}

int cmd_constellation(const std::string& name) {
    const auto c = ftn::build_constellation(parse_mod(name));
    std::cout << "index,re,im,label,ring\n";
    for (std::size_t i = 0; i < c.size(); ++i) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%zu,%.12f,%.12f,%u,%zu\n", i, c.point(i).real(), c.point(i).imag(),
                      c.label(i), c.ring_of(i));
        std::cout << buf;
    }
    return 0;
}

int cmd_capacity(const std::vector<std::string>& taus, double alpha, std::vector<double> snr, bool sinc) {
    if (snr.empty()) snr = {0, 5, 10, 15, 20, 25, 30};
    std::cout << "shape,alpha,tau,snr_db,c_ftn,c_nyquist\n";
    for (const auto& tau_text : taus) {
        const auto tau = parse_tau(tau_text);
        for (double v : snr) {
            ftn::CapacityQuery q;
            q.shape = sinc ? ftn::PulseShape::Sinc : ftn::PulseShape::Srrc;
            q.alpha = alpha;
            q.tau = tau.value();
            q.power = std::pow(10.0, v / 10.0);
            char buf[160];
            std::snprintf(buf, sizeof buf, "%s,%.3f,%.6f,%.3f,%.10g,%.10g\n", sinc ? "sinc" : "srrc", alpha, q.tau,
                          v, ftn::ftn_capacity(q), ftn::nyquist_capacity(q));
            std::cout << buf;
        }
    }
    return 0;
}

int cmd_complexity(const std::string& preset_name) {
    std::vector<ftn::EstimatorConfig> configs;
    std::vector<std::string> names = preset_name.empty() ? ftn::preset_names() : std::vector{preset_name};
    for (const auto& n : names)
        for (const auto& s : ftn::preset_group(n))
            for (const auto& e : s.estimators) {
                const bool seen = std::any_of(configs.begin(), configs.end(),
                                              [&](const ftn::EstimatorConfig& c) { return c.id() == e.id(); });
                if (!seen) configs.push_back(e);
            }
    bool all_exact = true;
    std::cout << "estimator,formula_mults,formula_adds,measured_mults,measured_adds,equal\n";
    for (const auto& row : ftn::complexity_report(configs)) {
        std::cout << row.estimator << ',' << row.formula.mults << ',' << row.formula.adds << ','
                  << row.measured->mults << ',' << row.measured->adds << ',' << (row.exact ? "yes" : "no") << '\n';
        all_exact = all_exact && row.exact;
    }
    return all_exact ? 0 : kExitRuntime;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Faster-than-Nyquist estimator simulator"};
    app.require_subcommand(1);

    RunArgs run;
    auto* run_cmd = app.add_subcommand("run", "Monte Carlo BER run of a preset or scenario file");
    run_cmd->add_option("--preset", run.preset, "preset name (see preset-list)");
    run_cmd->add_option("--config", run.config, "scenario JSON file");
    run_cmd->add_option("--seed", run.seed, "master seed");
    run_cmd->add_option("--snr", run.snr, "SNR grid override in dB")->delimiter(',');
    run_cmd->add_option("--min-bits", run.min_bits);
    run_cmd->add_option("--min-errors", run.min_errors);
    run_cmd->add_option("--max-bits", run.max_bits);
    run_cmd->add_flag("--full-chain", run.full_chain, "filter every waveform instead of the tap fast path");
    run_cmd->add_option("--out", run.out, "output directory")->capture_default_str();
    run_cmd->add_option("--threads", run.threads, "worker threads (0 = all cores)");
    run_cmd->add_flag("--quiet", run.quiet);

    bool show = false;
    auto* list_cmd = app.add_subcommand("preset-list", "List preset names");
    list_cmd->add_flag("--show", show, "print each preset as scenario JSON");

    std::string tau = "9/10";
    double alpha = 0.3;
    std::size_t order = 201, span = 0;
    bool sinc = false;
    auto* taps_cmd = app.add_subcommand("taps-dump", "Print ISI taps G_{1,n}");
    taps_cmd->add_option("--tau", tau, "P/Q")->capture_default_str();
    taps_cmd->add_option("--alpha", alpha)->capture_default_str();
    taps_cmd->add_option("--order", order)->capture_default_str();
    taps_cmd->add_option("--span", span, "number of taps (0 = full support)");
    taps_cmd->add_flag("--sinc", sinc, "sinc pulse instead of SRRC");

    std::string modulation = "qpsk";
    auto* const_cmd = app.add_subcommand("constellation-dump", "Print constellation points and labels");
    const_cmd->add_option("--modulation", modulation)->capture_default_str();

    std::vector<double> cap_snr;
    std::vector<std::string> cap_taus{"1/1", "9/10", "4/5", "7/10", "3/5", "1/2"};
    auto* cap_cmd = app.add_subcommand("capacity", "FTN and Nyquist capacity versus tau and P/N0 (Ts = 1)");
    cap_cmd->add_option("--tau", cap_taus, "comma-separated P/Q list")->delimiter(',')->capture_default_str();
    cap_cmd->add_option("--alpha", alpha)->capture_default_str();
    cap_cmd->add_option("--snr", cap_snr, "P Ts / N0 in dB")->delimiter(',');
    cap_cmd->add_flag("--sinc", sinc);

    std::string cx_preset;
    auto* cx_cmd = app.add_subcommand("complexity", "Formula and instrumented operation counts");
    cx_cmd->add_option("--preset", cx_preset, "restrict to one preset");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run_cmd) return cmd_run(run);
        if (*list_cmd) return cmd_presets(show);
        if (*taps_cmd) return cmd_taps(tau, alpha, order, span, sinc);
        if (*const_cmd) return cmd_constellation(modulation);
        if (*cap_cmd) return cmd_capacity(cap_taus, alpha, cap_snr, sinc);
        if (*cx_cmd) return cmd_complexity(cx_preset);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ftn::ChainError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitConfig;
}
