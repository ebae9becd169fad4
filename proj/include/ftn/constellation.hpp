#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ftn {

using cplx = std::complex<double>;

enum class Modulation { QPSK, PSK8, APSK16, APSK32, APSK64, APSK128, APSK256 };

inline constexpr Modulation kAllModulations[] = {
    Modulation::QPSK,    Modulation::PSK8,    Modulation::APSK16, Modulation::APSK32,
    Modulation::APSK64,  Modulation::APSK128, Modulation::APSK256,
};

std::string_view to_string(Modulation kind);
std::optional<Modulation> parse_modulation(std::string_view name);
unsigned bits_per_symbol(Modulation kind);

class ConstellationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// One ring of equally spaced points. Point p of the ring sits at angle
// (p + phase) * 2*pi / count, radius `ratio` relative to the innermost ring.
struct RingDef {
    std::size_t count = 0;
    double ratio = 1.0;
    double phase = 0.0;
};

// Geometry record as stored in data/constellations.json. `labels` lists the
// bit label of each point in ring-major, angle-ascending order; when empty the
// binary-reflected Gray code of the enumeration index is used.
struct RingGeometry {
    Modulation kind = Modulation::QPSK;
    std::vector<RingDef> rings;
    std::vector<std::uint32_t> labels;
    std::string note;
};

const RingGeometry& builtin_geometry(Modulation kind);
std::vector<RingGeometry> parse_geometry_json(std::string_view text);
std::vector<RingGeometry> load_geometry_file(const std::filesystem::path& path);
std::filesystem::path default_geometry_file();

// Immutable unit-average-energy alphabet with bit labels and a nearest-point
// decision device.
class Constellation {
  public:
    static Constellation from_geometry(const RingGeometry& geometry);

    Modulation kind() const { return kind_; }
    std::size_t size() const { return points_.size(); }
    unsigned bits_per_symbol() const { return bits_; }

    std::span<const cplx> points() const { return points_; }
    std::span<const std::uint32_t> labels() const { return labels_; }
    std::span<const double> ring_radii() const { return ring_radius_; }

    const cplx& point(std::size_t i) const { return points_[i]; }
    std::uint32_t label(std::size_t i) const { return labels_[i]; }
    std::size_t ring_of(std::size_t i) const { return point_ring_[i]; }
    std::size_t index_of_label(std::uint32_t label) const { return label_to_index_.at(label); }

    // Index of the nearest point; ties go to the lowest index. Throws on
    // non-finite input.
    std::size_t decide(cplx sample) const;
    cplx deci(cplx sample) const { return points_[decide(sample)]; }

    // Exact-match lookup; throws ConstellationError for a point not in the set.
    std::size_t index_of_point(cplx point) const;
    std::uint32_t demap(cplx point) const { return labels_[index_of_point(point)]; }

  private:
    struct RingIndex {
        double radius;
        double phase;
        std::size_t count;
        std::size_t first;
    };

    Modulation kind_ = Modulation::QPSK;
    unsigned bits_ = 0;
    std::vector<cplx> points_;
    std::vector<std::uint32_t> labels_;
    std::vector<std::size_t> label_to_index_;
    std::vector<std::size_t> point_ring_;
    std::vector<double> ring_radius_;
    std::vector<RingIndex> rings_;
};

Constellation build_constellation(Modulation kind);

// Bits are one per byte (0/1), most significant label bit first.
std::vector<cplx> modulate(std::span<const std::uint8_t> bits, const Constellation& c);
std::vector<std::size_t> modulate_indices(std::span<const std::uint8_t> bits, const Constellation& c);
std::vector<std::uint8_t> demap_bits(std::span<const cplx> points, const Constellation& c);
void append_label_bits(std::uint32_t label, unsigned bits, std::vector<std::uint8_t>& out);

inline cplx deci(cplx sample, const Constellation& c) { return c.deci(sample); }
inline std::uint32_t demap(cplx point, const Constellation& c) { return c.demap(point); }

} // namespace ftn
