#pragma once

#include <cstdint>
#include <vector>

#include "wavehf/kernel_operator.hpp"
#include "wavehf/lattice.hpp"

namespace wavehf {

enum class EnergyMode { reduced, full };

struct EnergyBreakdown {
    double kinetic = 0.0;
    double nuclear = 0.0;
    double hartree = 0.0;
    double exchange = 0.0;
    double total = 0.0;
};

/// Wave-matrix energy, evaluated through Ktilde = {w, w*} / 2:
///   kinetic  = tr(-Lap Ktilde) / 2
///   nuclear  = (1/2) int Vn rho
///   hartree  = (1/4) iint rho(x) c(x,y) rho(y)
///   exchange = -(1/4) iint |tau|^2 c           (full mode only)
EnergyBreakdown energy(const System& system, const KernelOperator& w, EnergyMode mode);

/// The same functional written for a density matrix K with rho = e K_ii, tau = e K.
EnergyBreakdown density_matrix_energy(const System& system, const KernelOperator& k, EnergyMode mode);

/// E(w_new) - E(w) computed from the increment d = w_new - w, so that tiny
/// changes are not lost to cancellation between two O(1) energies.
double energy_difference(const System& system, const KernelOperator& w, const KernelOperator& w_new,
                         EnergyMode mode);

struct QuadraticTerms {
    double kinetic = 0.0;
    double nuclear = 0.0;
};

/// Kinetic and nuclear terms from the kernel directly:
///   (1/4) iint |grad_x w|^2 + |grad_y w|^2   and   (e/4) iint (Vn(x) + Vn(y)) |w|^2,
/// with Dirichlet-padded forward differences. Matches energy() without forming Ktilde.
QuadraticTerms quadratic_terms_from_kernel(const System& system, const KernelOperator& w);

/// G = {Htilde(w), w}; Htilde includes e Ttilde in full mode.
KernelOperator gradient(const System& system, const KernelOperator& w, EnergyMode mode);

/// Central-difference gradient over every entry:
///   2 [dE/dRe w_ij + i dE/dIm w_ij] / h^{2d}.
/// Throws std::invalid_argument unless step is in [1e-7, 1e-3].
KernelOperator gradient_fd_oracle(const System& system, const KernelOperator& w, EnergyMode mode,
                                  double step);

struct FdSample {
    Eigen::Index row = 0;
    Eigen::Index col = 0;
    Complex value;
};

/// Same quantity on a seeded random subset of `count` distinct entries.
std::vector<FdSample> gradient_fd_sample(const System& system, const KernelOperator& w, EnergyMode mode,
                                         double step, std::size_t count, std::uint64_t seed);

/// Full-entry check for Ng <= 24, otherwise max(200, Ng) sampled entries.
std::vector<FdSample> gradient_fd_check_entries(const System& system, const KernelOperator& w,
                                                EnergyMode mode, double step, std::uint64_t seed);

/// max over samples |G_ij - FD_ij| divided by max_ij |G_ij|.
double max_relative_deviation(const KernelOperator& analytic, const std::vector<FdSample>& samples);

}  // namespace wavehf
