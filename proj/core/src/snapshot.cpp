#include "wavehf/snapshot.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include "wavehf/error.hpp"

namespace wavehf {
namespace {

constexpr std::array<char, 4> kMagic{'W', 'V', 'H', 'F'};

template <typename UInt>
void put_le(std::ostream& out, UInt value) {
    std::array<char, sizeof(UInt)> bytes{};
    for (std::size_t k = 0; k < sizeof(UInt); ++k) {
        bytes[k] = static_cast<char>((value >> (8 * k)) & 0xFFu);
    }
    out.write(bytes.data(), bytes.size());
}

template <typename UInt>
UInt get_le(std::istream& in) {
    std::array<unsigned char, sizeof(UInt)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (!in) {
        throw IoError("snapshot truncated");
    }
    UInt value = 0;
    for (std::size_t k = 0; k < sizeof(UInt); ++k) {
        value |= static_cast<UInt>(bytes[k]) << (8 * k);
    }
    return value;
}

void put_f64(std::ostream& out, double x) { put_le(out, std::bit_cast<std::uint64_t>(x)); }
double get_f64(std::istream& in) { return std::bit_cast<double>(get_le<std::uint64_t>(in)); }

}  // namespace

void write_snapshot(std::ostream& out, const KernelOperator& w, double t) {
    const Grid& g = w.grid();
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, kSnapshotVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.dimension()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.points_per_axis()));
    put_f64(out, g.half_extent());
    put_f64(out, g.spacing());
    put_f64(out, t);
    const auto& v = w.values();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
            put_f64(out, v(i, j).real());
            put_f64(out, v(i, j).imag());
        }
    }
}

Snapshot read_snapshot(std::istream& in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) {
        throw IoError("not a wave-matrix snapshot (bad magic)");
    }
    const auto version = get_le<std::uint32_t>(in);
    if (version != kSnapshotVersion) {
        throw IoError("unsupported snapshot version " + std::to_string(version));
    }
    const auto d = static_cast<int>(get_le<std::uint32_t>(in));
    const auto n = static_cast<int>(get_le<std::uint32_t>(in));
    const double L = get_f64(in);
    const double h = get_f64(in);
    const double t = get_f64(in);

    std::shared_ptr<const Grid> grid;
    try {
        grid = std::make_shared<const Grid>(Grid::build(d, n, L));
    } catch (const std::invalid_argument& e) {
        throw IoError(std::string("snapshot header: ") + e.what());
    }
    if (std::abs(grid->spacing() - h) > 1e-12 * h) {
        throw IoError("snapshot header spacing inconsistent with n and L");
    }

    const auto ng = grid->size();
    ComplexMatrix values(ng, ng);
    for (Eigen::Index i = 0; i < ng; ++i) {
        for (Eigen::Index j = 0; j < ng; ++j) {
            const double re = get_f64(in);
            const double im = get_f64(in);
            values(i, j) = Complex(re, im);
        }
    }
    if (!values.allFinite()) {
        throw IoError("snapshot contains non-finite entries");
    }
    return Snapshot{KernelOperator(std::move(grid), std::move(values)), t};
}

void save_snapshot(const std::filesystem::path& path, const KernelOperator& w, double t) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open snapshot for writing: " + path.string());
    }
    write_snapshot(out, w, t);
    if (!out) {
        throw IoError("failed writing snapshot: " + path.string());
    }
}

Snapshot load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open snapshot: " + path.string());
    }
    return read_snapshot(in);
}

}  // namespace wavehf
