#include "ftn/constellation.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace ftn {

namespace {

#include "geometry_data.inc"

struct ModulationName {
    Modulation kind;
    std::string_view name;
    unsigned bits;
};

constexpr std::array<ModulationName, 7> kNames{{
    {Modulation::QPSK, "qpsk", 2},
    {Modulation::PSK8, "8psk", 3},
    {Modulation::APSK16, "16apsk", 4},
    {Modulation::APSK32, "32apsk", 5},
    {Modulation::APSK64, "64apsk", 6},
    {Modulation::APSK128, "128apsk", 7},
    {Modulation::APSK256, "256apsk", 8},
}};

std::uint32_t gray(std::uint32_t v) { return v ^ (v >> 1); }

std::vector<RingGeometry> parse_geometry(const nlohmann::json& doc) {
    if (!doc.contains("constellations"))
        throw ConstellationError("geometry file has no 'constellations' array");
    std::vector<RingGeometry> out;
    for (const auto& entry : doc.at("constellations")) {
        RingGeometry g;
        const auto name = entry.at("kind").get<std::string>();
        const auto kind = parse_modulation(name);
        if (!kind)
            throw ConstellationError("unknown constellation kind '" + name + "'");
        g.kind = *kind;
        for (const auto& r : entry.at("rings")) {
            RingDef def;
            def.count = r.at("count").get<std::size_t>();
            def.ratio = r.at("ratio").get<double>();
            def.phase = r.value("phase", 0.0);
            g.rings.push_back(def);
        }
        if (entry.contains("labels"))
            g.labels = entry.at("labels").get<std::vector<std::uint32_t>>();
        g.note = entry.value("note", std::string{});
        out.push_back(std::move(g));
    }
    return out;
}

const std::vector<RingGeometry>& builtin_table() {
    static const std::vector<RingGeometry> table = parse_geometry_json(kGeometryJson);
    return table;
}

} // namespace

std::string_view to_string(Modulation kind) {
    for (const auto& n : kNames)
        if (n.kind == kind) return n.name;
    return "unknown";
}

std::optional<Modulation> parse_modulation(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    std::erase(lower, '-');
    for (const auto& n : kNames)
        if (n.name == lower) return n.kind;
    if (lower == "psk8") return Modulation::PSK8;
    if (lower.starts_with("apsk")) {
        // apsk16 etc.
        const std::string rotated = lower.substr(4) + "apsk";
        for (const auto& n : kNames)
            if (n.name == rotated) return n.kind;
    }
    return std::nullopt;
}

unsigned bits_per_symbol(Modulation kind) {
    for (const auto& n : kNames)
        if (n.kind == kind) return n.bits;
    return 0;
}

std::vector<RingGeometry> parse_geometry_json(std::string_view text) {
    try {
        return parse_geometry(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ConstellationError(std::string("malformed geometry data: ") + e.what());
    }
}

std::vector<RingGeometry> load_geometry_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ConstellationError("cannot open geometry file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_geometry_json(ss.str());
}

std::filesystem::path default_geometry_file() {
    return std::filesystem::path(FTN_DATA_DIR) / "constellations.json";
}

const RingGeometry& builtin_geometry(Modulation kind) {
    for (const auto& g : builtin_table())
        if (g.kind == kind) return g;
    throw ConstellationError("no built-in geometry for " + std::string(to_string(kind)));
}

Constellation Constellation::from_geometry(const RingGeometry& geometry) {
    Constellation c;
    c.kind_ = geometry.kind;

    std::size_t m = 0;
    double energy = 0.0;
    for (const auto& r : geometry.rings) {
        if (r.count == 0 || !(r.ratio > 0.0))
            throw ConstellationError("ring with zero points or non-positive radius");
        m += r.count;
        energy += static_cast<double>(r.count) * r.ratio * r.ratio;
    }
    if (m < 2 || (m & (m - 1)) != 0)
        throw ConstellationError("constellation size must be a power of two, got " + std::to_string(m));
    c.bits_ = static_cast<unsigned>(std::countr_zero(m));
    if (c.bits_ != ftn::bits_per_symbol(geometry.kind))
        throw ConstellationError("point count does not match " + std::string(to_string(geometry.kind)));

    const double scale = 1.0 / std::sqrt(energy / static_cast<double>(m));
    c.points_.reserve(m);
    for (std::size_t ri = 0; ri < geometry.rings.size(); ++ri) {
        const auto& r = geometry.rings[ri];
        const double radius = r.ratio * scale;
        c.rings_.push_back({radius, r.phase, r.count, c.points_.size()});
        c.ring_radius_.push_back(radius);
        for (std::size_t p = 0; p < r.count; ++p) {
            const double angle = (static_cast<double>(p) + r.phase) * 2.0 * std::numbers::pi /
                                 static_cast<double>(r.count);
            c.points_.push_back(std::polar(radius, angle));
            c.point_ring_.push_back(ri);
        }
    }

    if (geometry.labels.empty()) {
        for (std::size_t i = 0; i < m; ++i) c.labels_.push_back(gray(static_cast<std::uint32_t>(i)));
    } else {
        if (geometry.labels.size() != m)
            throw ConstellationError("label count does not match point count");
        c.labels_ = geometry.labels;
    }

    c.label_to_index_.assign(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto lab = c.labels_[i];
        if (lab >= m || c.label_to_index_[lab] != m)
            throw ConstellationError("labels are not a bijection onto the bit patterns");
        c.label_to_index_[lab] = i;
    }

    std::sort(c.rings_.begin(), c.rings_.end(),
              [](const RingIndex& a, const RingIndex& b) { return a.radius < b.radius; });
    return c;
}

std::size_t Constellation::decide(cplx sample) const {
    if (!std::isfinite(sample.real()) || !std::isfinite(sample.imag()))
        throw ConstellationError("deci: non-finite sample");

    const double r = std::abs(sample);
    const double theta = std::arg(sample);

    double best_d2 = std::numeric_limits<double>::infinity();
    std::size_t best = points_.size();
    auto consider = [&](std::size_t idx) {
        const double d2 = std::norm(sample - points_[idx]);
        if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
            best_d2 = d2;
            best = idx;
        }
    };

    // Rings are sorted by radius; walk outward from the ring closest in
    // radius. |r - R|^2 lower-bounds the distance to every point of a ring.
    const auto n_rings = static_cast<std::ptrdiff_t>(rings_.size());
    std::ptrdiff_t hi = std::lower_bound(rings_.begin(), rings_.end(), r,
                                         [](const RingIndex& ring, double v) { return ring.radius < v; }) -
                        rings_.begin();
    std::ptrdiff_t lo = hi - 1;
    auto scan_ring = [&](const RingIndex& ring) {
        const double n = static_cast<double>(ring.count);
        double x = theta * n / (2.0 * std::numbers::pi) - ring.phase;
        x = std::fmod(x, n);
        if (x < 0) x += n;
        auto p0 = static_cast<std::size_t>(std::floor(x)) % ring.count;
        const std::size_t p1 = (p0 + 1) % ring.count;
        consider(ring.first + p0);
        consider(ring.first + p1);
    };
    while (lo >= 0 || hi < n_rings) {
        const double dlo = lo >= 0 ? r - rings_[lo].radius : std::numeric_limits<double>::infinity();
        const double dhi = hi < n_rings ? rings_[hi].radius - r : std::numeric_limits<double>::infinity();
        if (dlo <= dhi) {
            if (dlo * dlo > best_d2) break;
            scan_ring(rings_[lo--]);
        } else {
            if (dhi * dhi > best_d2) break;
            scan_ring(rings_[hi++]);
        }
    }
    return best;
}

std::size_t Constellation::index_of_point(cplx point) const {
    const std::size_t idx = decide(point);
    if (points_[idx] != point)
        throw ConstellationError("demap: sample is not a constellation point");
    return idx;
}

Constellation build_constellation(Modulation kind) {
    return Constellation::from_geometry(builtin_geometry(kind));
}

std::vector<std::size_t> modulate_indices(std::span<const std::uint8_t> bits, const Constellation& c) {
    const unsigned k = c.bits_per_symbol();
    if (bits.size() % k != 0)
        throw ConstellationError("modulate: bit count " + std::to_string(bits.size()) +
                                 " is not a multiple of " + std::to_string(k));
    std::vector<std::size_t> out;
    out.reserve(bits.size() / k);
    for (std::size_t i = 0; i < bits.size(); i += k) {
        std::uint32_t label = 0;
        for (unsigned b = 0; b < k; ++b) label = (label << 1) | (bits[i + b] & 1u);
        out.push_back(c.index_of_label(label));
    }
    return out;
}

std::vector<cplx> modulate(std::span<const std::uint8_t> bits, const Constellation& c) {
    std::vector<cplx> out;
    for (auto idx : modulate_indices(bits, c)) out.push_back(c.point(idx));
    return out;
}

void append_label_bits(std::uint32_t label, unsigned bits, std::vector<std::uint8_t>& out) {
    for (unsigned b = bits; b-- > 0;) out.push_back(static_cast<std::uint8_t>((label >> b) & 1u));
}

std::vector<std::uint8_t> demap_bits(std::span<const cplx> points, const Constellation& c) {
    std::vector<std::uint8_t> out;
    out.reserve(points.size() * c.bits_per_symbol());
    for (const auto& p : points) append_label_bits(c.demap(p), c.bits_per_symbol(), out);
    return out;
}

} // namespace ftn
