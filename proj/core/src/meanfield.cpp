#include "wavehf/meanfield.hpp"

#include <utility>

namespace wavehf {

MeanDensity mean_density(const KernelOperator& w) {
    const auto dm = density_matrices(w);
    ComplexMatrix tau = kElectronCharge * dm.ktilde.values();
    RealVector rho = tau.diagonal().real();
    return MeanDensity{std::move(rho), std::move(tau)};
}

RealVector charge_density(const KernelOperator& w) {
    const auto& v = w.values();
    const double scale = 0.5 * kElectronCharge * w.grid().cell_volume();
    return scale * (v.rowwise().squaredNorm() + v.colwise().squaredNorm().transpose());
}

RealVector hartree_potential(const RealVector& rho, const CoulombKernel& kernel, const Grid& grid) {
    return grid.cell_volume() * (kernel.values() * rho);
}

KernelOperator exchange_operator(const ComplexMatrix& tau, const CoulombKernel& kernel,
                                 std::shared_ptr<const Grid> grid) {
    ComplexMatrix t = -tau.cwiseProduct(kernel.values().cast<Complex>());
    return KernelOperator(std::move(grid), std::move(t));
}

namespace {

// e (Ve_i + Ve_j) w_ij
ComplexMatrix hartree_anticommutator(const RealVector& ve, const ComplexMatrix& w) {
    const Eigen::Index ng = w.rows();
    ComplexMatrix out(ng, ng);
    for (Eigen::Index j = 0; j < ng; ++j) {
        for (Eigen::Index i = 0; i < ng; ++i) {
            out(i, j) = kElectronCharge * (ve(i) + ve(j)) * w(i, j);
        }
    }
    return out;
}

}  // namespace

KernelOperator nonlinear_term(const KernelOperator& w, const CoulombKernel& kernel) {
    const RealVector ve = hartree_potential(charge_density(w), kernel, w.grid());
    return KernelOperator(w.grid_ptr(), hartree_anticommutator(ve, w.values()));
}

MeanField assemble_hamiltonian(const System& system, const KernelOperator& w, bool exchange) {
    require_same_grid(system.h0, w);
    MeanDensity density = mean_density(w);
    const Eigen::Index ng = w.size();
    RealVector ve = RealVector::Zero(ng);
    KernelOperator hq = system.h0;
    if (system.coupling) {
        ve = hartree_potential(density.rho, system.kernel, *system.grid);
        hq += KernelOperator::multiplication(system.grid, kElectronCharge * ve);
        if (exchange) {
            hq += kElectronCharge * exchange_operator(density.tau, system.kernel, system.grid);
        }
    }
    return MeanField{std::move(density.rho), std::move(density.tau), std::move(ve), std::move(hq)};
}

KernelOperator interaction_operator(const System& system, const KernelOperator& w, bool exchange) {
    require_same_grid(system.h0, w);
    if (!system.coupling) {
        return KernelOperator::zero(system.grid);
    }
    if (!exchange) {
        const RealVector ve = hartree_potential(charge_density(w), system.kernel, *system.grid);
        return KernelOperator::multiplication(system.grid, kElectronCharge * ve);
    }
    const MeanDensity density = mean_density(w);
    const RealVector ve = hartree_potential(density.rho, system.kernel, *system.grid);
    return KernelOperator::multiplication(system.grid, kElectronCharge * ve) +
           kElectronCharge * exchange_operator(density.tau, system.kernel, system.grid);
}

KernelOperator interaction_anticommutator(const System& system, const KernelOperator& w, bool exchange) {
    require_same_grid(system.h0, w);
    if (!system.coupling) {
        return KernelOperator::zero(system.grid);
    }
    if (!exchange) {
        return nonlinear_term(w, system.kernel);
    }
    const MeanDensity density = mean_density(w);
    const RealVector ve = hartree_potential(density.rho, system.kernel, *system.grid);
    KernelOperator out(system.grid, hartree_anticommutator(ve, w.values()));
    const KernelOperator x = kElectronCharge * exchange_operator(density.tau, system.kernel, system.grid);
    out += anticommutator(x, w);
    return out;
}

KernelOperator density_matrix_hamiltonian(const System& system, const KernelOperator& k, bool exchange) {
    require_same_grid(system.h0, k);
    KernelOperator h = system.h0;
    if (!system.coupling) {
        return h;
    }
    const ComplexMatrix tau = kElectronCharge * k.values();
    const RealVector rho = tau.diagonal().real();
    const RealVector ve = hartree_potential(rho, system.kernel, *system.grid);
    h += KernelOperator::multiplication(system.grid, kElectronCharge * ve);
    if (exchange) {
        h += kElectronCharge * exchange_operator(tau, system.kernel, system.grid);
    }
    return h;
}

}  // namespace wavehf
