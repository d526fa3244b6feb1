#include "wavehf/shell/csv.hpp"

#include <cstdio>
#include <ostream>

namespace wavehf::shell {

std::string format_double(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

void write_csv_header(std::ostream& out) {
    out << kCsvHeader << '\n';
}

void write_csv_row(std::ostream& out, const TrajectoryRecord& r) {
    const double fields[] = {r.t,
                             r.energy.total,
                             r.energy.kinetic,
                             r.energy.nuclear,
                             r.energy.hartree,
                             r.energy.exchange,
                             r.charge,
                             r.hs_norm,
                             r.h1_norm,
                             r.h2_norm,
                             r.op_norm,
                             r.k_min_eig,
                             r.k_max_eig};
    for (double f : fields) {
        out << format_double(f) << ',';
    }
    out << r.picard_iters << ',';
    if (r.vn_residual) {
        out << format_double(*r.vn_residual);
    }
    out << '\n';
}

void write_csv(std::ostream& out, std::span<const TrajectoryRecord> records) {
    write_csv_header(out);
    for (const auto& r : records) {
        write_csv_row(out, r);
    }
}

}  // namespace wavehf::shell
