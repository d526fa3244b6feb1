#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "wavehf/energy.hpp"
#include "wavehf/lattice.hpp"
#include "wavehf/propagator.hpp"

namespace wavehf::shell {

enum class InitialKind { scf_projector, lowest_orbitals_projector, file, random_feasible };

/// Everything a command needs. Loaded from a flat JSON document; unknown keys are rejected.
struct RunConfig {
    int dimension = 1;
    int points_per_axis = 64;
    double half_extent = 10.0;
    double softening = 0.5;
    Nuclei nuclei;
    std::optional<int> electron_count;  ///< defaults to the sum of nuclear charges

    InitialKind initial = InitialKind::scf_projector;
    std::filesystem::path initial_file;  ///< for "file:<path>"
    double perturbation = 0.0;           ///< H0 norm of a random Hermitian kick, then projected
    std::uint64_t seed = 1;

    bool coupling = true;
    bool exchange = false;

    Scheme scheme = Scheme::duhamel;
    double dt = 1e-3;
    double T = 1.0;
    double picard_tol = 1e-12;
    int picard_max_iter = 50;

    long record_stride = 10;
    std::filesystem::path csv_path;
    std::filesystem::path snapshot_dir;
    long snapshot_stride = 0;  ///< 0 disables snapshots

    double fd_step = 1e-5;
    double vn_time = 0.02;  ///< trajectory length before the von Neumann residual is sampled

    double scf_mixing = 0.3;
    int scf_max_iter = 500;
    int min_max_iter = 5000;
    double min_grad_tol = 1e-7;

    int electrons() const { return electron_count.value_or(electron_count_of_nuclei()); }
    EnergyMode mode() const { return exchange ? EnergyMode::full : EnergyMode::reduced; }
    StepperConfig stepper() const;

    /// Throws ConfigError naming the offending field.
    void validate() const;

private:
    int electron_count_of_nuclei() const { return wavehf::electron_count(nuclei); }
};

/// Parses and type-checks; call validate() after applying overrides.
/// Throws ConfigError with the line/column or field name.
RunConfig parse_config(const std::string& text);

/// Reads the file (IoError if unreadable) and parses it.
RunConfig load_config(const std::filesystem::path& path);

/// Command-line overrides, applied on top of the file before validation.
struct Overrides {
    std::optional<double> dt;
    std::optional<double> T;
    bool exchange = false;
    std::optional<std::uint64_t> seed;
};

void apply_overrides(RunConfig& config, const Overrides& overrides);

}  // namespace wavehf::shell
