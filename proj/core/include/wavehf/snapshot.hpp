#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "wavehf/kernel_operator.hpp"

namespace wavehf {

/// Binary snapshot layout, all little-endian:
///   "WVHF" | u32 version | u32 d | u32 n | f64 L | f64 h | f64 t |
///   Ng*Ng entries (f64 re, f64 im), row-major.
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct Snapshot {
    KernelOperator state;
    double time = 0.0;
};

void write_snapshot(std::ostream& out, const KernelOperator& w, double t);
Snapshot read_snapshot(std::istream& in);

/// Throw IoError on file failures and on malformed content.
void save_snapshot(const std::filesystem::path& path, const KernelOperator& w, double t);
Snapshot load_snapshot(const std::filesystem::path& path);

}  // namespace wavehf
