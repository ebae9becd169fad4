#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ftn/harness.hpp"

namespace ftn {

namespace {

using nlohmann::json;

std::string_view unit_name(SnrUnit u) { return u == SnrUnit::EbN0 ? "ebn0" : "esn0"; }
std::string_view reference_name(ReferenceMode m) {
    return m == ReferenceMode::ClosedForm ? "closed-form" : "nyquist-simulated";
}

EstimatorConfig estimator_from_json(const json& j) {
    const auto kind_name = j.at("kind").get<std::string>();
    const auto kind = parse_estimator_kind(kind_name);
    if (!kind) throw ScenarioError("unknown estimator kind '" + kind_name + "'");
    switch (*kind) {
    case EstimatorKind::SSSSE: return EstimatorConfig::sssse(j.at("span").get<std::size_t>());
    case EstimatorKind::SSSGBKSE:
        return EstimatorConfig::sssgbkse(j.at("span").get<std::size_t>(), j.at("go_back").get<std::size_t>());
    case EstimatorKind::MLISIC:
        return EstimatorConfig::mlisic(j.at("span").get<std::size_t>(), j.at("layers").get<std::size_t>());
    case EstimatorKind::IMLISIC: {
        auto spans = j.at("spans").get<std::vector<std::size_t>>();
        LengthMode mode = natural_length_mode(spans);
        if (j.contains("mode")) {
            const auto name = j.at("mode").get<std::string>();
            const auto m = parse_length_mode(name);
            if (!m) throw ScenarioError("unknown length mode '" + name + "'");
            mode = *m;
        }
        auto cfg = EstimatorConfig::imlisic(std::move(spans), mode);
        if (j.contains("layers") && j.at("layers").get<std::size_t>() != cfg.layers)
            throw ScenarioError("IMLISIC 'layers' does not match the number of spans");
        return cfg;
    }
    }
    throw ScenarioError("unreachable estimator kind");
}

json estimator_to_json(const EstimatorConfig& e) {
    json j;
    j["kind"] = std::string(to_string(e.kind));
    switch (e.kind) {
    case EstimatorKind::SSSSE: j["span"] = e.span; break;
    case EstimatorKind::SSSGBKSE:
        j["span"] = e.span;
        j["go_back"] = e.go_back;
        break;
    case EstimatorKind::MLISIC:
        j["span"] = e.span;
        j["layers"] = e.layers;
        break;
    case EstimatorKind::IMLISIC:
        j["spans"] = e.spans;
        j["mode"] = std::string(to_string(e.mode));
        break;
    }
    return j;
}

Scenario scenario_from_json(const json& j) {
    Scenario s = j.contains("preset") ? preset(j.at("preset").get<std::string>()) : Scenario{};
    if (j.contains("id")) s.id = j.at("id").get<std::string>();
    if (j.contains("modulation")) {
        const auto name = j.at("modulation").get<std::string>();
        const auto m = parse_modulation(name);
        if (!m) throw ScenarioError("unknown modulation '" + name + "'");
        s.modulation = *m;
        if (!j.contains("reference") && !j.contains("preset"))
            s.reference = *m == Modulation::QPSK ? ReferenceMode::ClosedForm : ReferenceMode::NyquistSimulated;
    }
    if (j.contains("tau")) {
        const auto& t = j.at("tau");
        if (t.is_array() && t.size() == 2) {
            s.tau = {t[0].get<std::uint32_t>(), t[1].get<std::uint32_t>()};
        } else if (t.is_object()) {
            s.tau = {t.at("p").get<std::uint32_t>(), t.at("q").get<std::uint32_t>()};
        } else {
            throw ScenarioError("'tau' must be [P, Q] or {\"p\": P, \"q\": Q}");
        }
    }
    if (j.contains("alpha")) s.alpha = j.at("alpha").get<double>();
    if (j.contains("order")) s.order = j.at("order").get<std::size_t>();
    if (j.contains("estimators")) {
        s.estimators.clear();
        for (const auto& e : j.at("estimators")) s.estimators.push_back(estimator_from_json(e));
    }
    if (j.contains("snr_db")) s.snr_db = j.at("snr_db").get<std::vector<double>>();
    if (j.contains("snr_unit")) {
        const auto u = j.at("snr_unit").get<std::string>();
        if (u == "ebn0" || u == "EbN0") s.snr_unit = SnrUnit::EbN0;
        else if (u == "esn0" || u == "EsN0") s.snr_unit = SnrUnit::EsN0;
        else throw ScenarioError("snr_unit must be 'ebn0' or 'esn0'");
    }
    if (j.contains("stop")) {
        const auto& st = j.at("stop");
        s.stop.min_bits = st.value("min_bits", s.stop.min_bits);
        s.stop.min_errors = st.value("min_errors", s.stop.min_errors);
        s.stop.max_bits = st.value("max_bits", s.stop.max_bits);
    }
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("reference")) {
        const auto r = j.at("reference").get<std::string>();
        if (r == "closed-form") s.reference = ReferenceMode::ClosedForm;
        else if (r == "nyquist-simulated") s.reference = ReferenceMode::NyquistSimulated;
        else throw ScenarioError("reference must be 'closed-form' or 'nyquist-simulated'");
    }
    if (j.contains("block_symbols")) s.block_symbols = j.at("block_symbols").get<std::size_t>();
    if (j.contains("full_chain")) s.full_chain = j.at("full_chain").get<bool>();
    return s;
}

} // namespace

Scenario scenario_from_json_text(std::string_view text) {
    try {
        return scenario_from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw ScenarioError(std::string("malformed scenario: ") + e.what());
    }
}

std::string scenario_to_json_text(const Scenario& s) {
    json j;
    j["id"] = s.id;
    j["modulation"] = std::string(to_string(s.modulation));
    j["tau"] = {s.tau.p, s.tau.q};
    j["alpha"] = s.alpha;
    j["order"] = s.order;
    j["estimators"] = json::array();
    for (const auto& e : s.estimators) j["estimators"].push_back(estimator_to_json(e));
    j["snr_db"] = s.snr_db;
    j["snr_unit"] = std::string(unit_name(s.snr_unit));
    j["stop"] = {{"min_bits", s.stop.min_bits}, {"min_errors", s.stop.min_errors}, {"max_bits", s.stop.max_bits}};
    j["seed"] = s.seed;
    j["reference"] = std::string(reference_name(s.reference));
    j["block_symbols"] = s.block_symbols;
    j["full_chain"] = s.full_chain;
    return j.dump(2);
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_json_text(ss.str());
}

} // namespace ftn
