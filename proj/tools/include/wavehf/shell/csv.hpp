#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "wavehf/diagnostics.hpp"

namespace wavehf::shell {

/// Column order of the trajectory CSV.
inline constexpr const char* kCsvHeader =
    "t,E_total,E_kinetic,E_nuclear,E_hartree,E_exchange,charge,hs_norm,h1_norm,h2_norm,op_norm,"
    "k_min_eig,k_max_eig,picard_iters,vn_residual";

/// Shortest round-trippable text for a double (%.17g).
std::string format_double(double value);

void write_csv_header(std::ostream& out);
/// A missing vn_residual becomes an empty field.
void write_csv_row(std::ostream& out, const TrajectoryRecord& record);
void write_csv(std::ostream& out, std::span<const TrajectoryRecord> records);

}  // namespace wavehf::shell
