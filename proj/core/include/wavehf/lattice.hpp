#pragma once

#include <array>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "wavehf/grid.hpp"
#include "wavehf/kernel_operator.hpp"

namespace wavehf {

/// Units: hbar = 1, kinetic operator exactly -Laplacian, electron charge e = -1.
inline constexpr double kElectronCharge = -1.0;

struct Nucleus {
    std::array<double, 3> position{0.0, 0.0, 0.0};  ///< only the first d components are used
    int charge = 1;
};

using Nuclei = std::vector<Nucleus>;

/// Sum of nuclear charges: the neutral electron count.
int electron_count(const Nuclei& nuclei);

/// Soft Coulomb kernel c_ij = 1 / sqrt(|x_i - x_j|^2 + a^2) on the grid.
class CoulombKernel {
public:
    /// Throws std::invalid_argument for a nonpositive softening.
    static CoulombKernel build(const Grid& grid, double softening);

    /// 1 / sqrt(r^2 + a^2).
    static double eval(double distance_squared, double softening) noexcept;

    double softening() const noexcept { return softening_; }
    const Eigen::MatrixXd& values() const noexcept { return values_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

private:
    CoulombKernel(double softening, Eigen::MatrixXd values);

    double softening_;
    Eigen::MatrixXd values_;
};

/// Vn(x_i) = sum_j Z_j c(x_i, X_j) >= 0. Throws std::invalid_argument for a
/// nucleus outside the box or a nonpositive charge.
RealVector nuclear_potential(const Grid& grid, const Nuclei& nuclei, double softening);

/// Action matrix of the Dirichlet 3-point Laplacian, negated: positive semidefinite.
Eigen::MatrixXd negative_laplacian(const Grid& grid);

/// H0 = -Laplacian + e Vn in kernel convention.
KernelOperator free_hamiltonian(std::shared_ptr<const Grid> grid, const RealVector& vn);

/// Everything that stays fixed during a run: grid, nuclei, Coulomb kernel and H0.
/// `coupling` switches the electron-electron interaction on or off.
struct System {
    std::shared_ptr<const Grid> grid;
    Nuclei nuclei;
    CoulombKernel kernel;
    RealVector vn;
    Eigen::MatrixXd neg_laplacian;
    KernelOperator h0;
    bool coupling = true;
};

System make_system(const Grid& grid, Nuclei nuclei, double softening, bool coupling = true);

}  // namespace wavehf
