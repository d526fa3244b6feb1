#pragma once

#include "wavehf/kernel_operator.hpp"
#include "wavehf/lattice.hpp"

namespace wavehf {

/// rho_i = e Ktilde_ii and tau_ij = e Ktilde_ij for Ktilde = {w, w*} / 2.
struct MeanDensity {
    RealVector rho;
    ComplexMatrix tau;
};

MeanDensity mean_density(const KernelOperator& w);

/// Diagonal of mean_density(w).rho without forming Ktilde.
RealVector charge_density(const KernelOperator& w);

/// Ve(x_i) = h^d sum_j c_ij rho_j.
RealVector hartree_potential(const RealVector& rho, const CoulombKernel& kernel, const Grid& grid);

/// Kernel Ttilde_ij = -tau_ij c_ij.
KernelOperator exchange_operator(const ComplexMatrix& tau, const CoulombKernel& kernel,
                                 std::shared_ptr<const Grid> grid);

/// F(w) = {V, w} with V the multiplication operator by e Ve(w):
/// F_ij = e (Ve_i + Ve_j) w_ij. The factor e is included here so that F is
/// exactly the nonlinear part of the reduced generator.
KernelOperator nonlinear_term(const KernelOperator& w, const CoulombKernel& kernel);

struct MeanField {
    RealVector rho;
    ComplexMatrix tau;
    RealVector ve;
    KernelOperator hq;  ///< H0 + e Ve [+ e Ttilde]
};

/// Assembles the mean-field Hamiltonian for w. With coupling off, Ve = 0 and hq = H0.
MeanField assemble_hamiltonian(const System& system, const KernelOperator& w, bool exchange);

/// The interaction part Vtilde = hq - H0.
KernelOperator interaction_operator(const System& system, const KernelOperator& w, bool exchange);

/// {Vtilde(w), w}, using the entrywise form for the Hartree part.
KernelOperator interaction_anticommutator(const System& system, const KernelOperator& w, bool exchange);

/// Standard Hartree-Fock operator H(K) = H0 + e Ve[rho] + e T[tau] built directly
/// from a density matrix K with rho = e K_ii and tau = e K.
KernelOperator density_matrix_hamiltonian(const System& system, const KernelOperator& k, bool exchange);

}  // namespace wavehf
