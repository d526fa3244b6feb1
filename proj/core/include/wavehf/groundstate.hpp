#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wavehf/energy.hpp"
#include "wavehf/kernel_operator.hpp"
#include "wavehf/lattice.hpp"
#include "wavehf/norms.hpp"

namespace wavehf {

struct ScfConfig {
    int electron_count = 1;
    int max_iter = 500;
    double mixing = 0.3;           ///< fallback step when the Aufbau direction is not a descent direction
    double energy_tol = 1e-10;
    double density_tol = 1e-8;
    EnergyMode mode = EnergyMode::reduced;

    void validate(const Grid& grid) const;
};

struct ScfResult {
    KernelOperator density;        ///< Aufbau projector onto the N lowest orbitals
    double energy = 0.0;
    int iterations = 0;
    double last_energy_change = 0.0;
    double last_density_change = 0.0;
    RealVector orbital_energies;   ///< eigenvalues of the converged mean-field operator
};

/// Density-matrix SCF with Aufbau occupation, starting from
/// the projector onto the N lowest orbitals of H0. Throws NumericalError on
/// non-convergence or when the HOMO-LUMO gap falls below 1e-10. Each update moves
/// toward the new Aufbau projector by the step that minimizes the energy on that
/// segment, which is exact because the energy is quadratic in K.
ScfResult scf_ground_state(const System& system, const ScfConfig& config);

/// Projector onto the N lowest eigenvectors of a Hermitian operator.
KernelOperator aufbau_projector(const KernelOperator& hamiltonian, int electron_count);

struct MinimizerConfig {
    int electron_count = 1;
    double step_size = 0.1;
    double backtrack = 0.5;
    double grad_tol = 1e-7;
    int max_iter = 5000;
    double probe_step = 1e-3;  ///< step used to measure the projected gradient
    std::uint64_t seed = 1;
    EnergyMode mode = EnergyMode::reduced;

    void validate(const Grid& grid) const;
};

struct MinimizerResult {
    KernelOperator wave_matrix;
    double energy = 0.0;
    int iterations = 0;
    double projected_gradient = 0.0;
    /// Energies of the accepted iterates, starting with the initial one. Each entry is the
    /// previous one plus energy_difference(), so it is free of cancellation noise.
    std::vector<double> energy_history;
};

/// Nearest point of {singular values in [0,1], sum sigma^2 = N}: singular values
/// are rescaled by one common factor and clipped at 1. Throws std::invalid_argument
/// when N > Ng and NumericalError when w has fewer than N nonzero singular values.
KernelOperator project_feasible(const KernelOperator& w, int electron_count);

/// || w - P(w - s G) ||_H0 / s with s = probe_step.
double projected_gradient_norm(const System& system, const KernelOperator& w, int electron_count,
                               EnergyMode mode, double probe_step);

KernelOperator random_feasible(std::shared_ptr<const Grid> grid, int electron_count, std::uint64_t seed);

/// Projected gradient descent on the wave-matrix energy over the feasible set.
/// Trial steps are Barzilai-Borwein lengths (step_size on the first iteration)
/// shrunk by `backtrack` until the energy does not increase by more than the
/// roundoff left by the projection (16 eps ||G|| ||w||). Starts from `init`
/// (projected) or from a seeded random feasible point.
MinimizerResult wavematrix_ground_state(const System& system, const MinimizerConfig& config,
                                        const std::optional<KernelOperator>& init = std::nullopt);

struct EquivalenceReport {
    double e_scf = 0.0;
    double e_wm = 0.0;
    double abs_diff = 0.0;
    int scf_iterations = 0;
    int wm_iterations = 0;
    double wm_projected_gradient = 0.0;
    RealVector singular_values;    ///< of the wave-matrix optimum
    SpectralBounds ktilde_bounds;  ///< of its Ktilde
};

EquivalenceReport equivalence_report(const System& system, const ScfConfig& scf, const MinimizerConfig& min);

}  // namespace wavehf
