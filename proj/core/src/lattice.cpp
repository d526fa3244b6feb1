#include "wavehf/lattice.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace wavehf {

int electron_count(const Nuclei& nuclei) {
    int n = 0;
    for (const auto& nucleus : nuclei) {
        n += nucleus.charge;
    }
    return n;
}

CoulombKernel::CoulombKernel(double softening, Eigen::MatrixXd values)
    : softening_(softening), values_(std::move(values)) {}

double CoulombKernel::eval(double distance_squared, double softening) noexcept {
    return 1.0 / std::sqrt(distance_squared + softening * softening);
}

CoulombKernel CoulombKernel::build(const Grid& grid, double softening) {
    if (!(softening > 0.0) || !std::isfinite(softening)) {
        throw std::invalid_argument("Coulomb softening must be positive and finite");
    }
    const auto ng = grid.size();
    Eigen::MatrixXd c(ng, ng);
    for (Eigen::Index i = 0; i < ng; ++i) {
        const auto xi = grid.point(i);
        c(i, i) = 1.0 / softening;
        for (Eigen::Index j = 0; j < i; ++j) {
            const auto xj = grid.point(j);
            double r2 = 0.0;
            for (int a = 0; a < grid.dimension(); ++a) {
                r2 += (xi[a] - xj[a]) * (xi[a] - xj[a]);
            }
            c(i, j) = c(j, i) = eval(r2, softening);
        }
    }
    return CoulombKernel(softening, std::move(c));
}

RealVector nuclear_potential(const Grid& grid, const Nuclei& nuclei, double softening) {
    const double L = grid.half_extent();
    for (const auto& nucleus : nuclei) {
        if (nucleus.charge <= 0) {
            throw std::invalid_argument("nuclear charges must be positive");
        }
        for (int a = 0; a < grid.dimension(); ++a) {
            if (std::abs(nucleus.position[a]) > L) {
                throw std::invalid_argument("nucleus lies outside the simulation box");
            }
        }
    }
    RealVector vn = RealVector::Zero(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        const auto x = grid.point(i);
        for (const auto& nucleus : nuclei) {
            double r2 = 0.0;
            for (int a = 0; a < grid.dimension(); ++a) {
                r2 += (x[a] - nucleus.position[a]) * (x[a] - nucleus.position[a]);
            }
            vn(i) += nucleus.charge * CoulombKernel::eval(r2, softening);
        }
    }
    return vn;
}

Eigen::MatrixXd negative_laplacian(const Grid& grid) {
    const auto ng = grid.size();
    const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    const int n = grid.points_per_axis();
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(ng, ng);
    for (Eigen::Index i = 0; i < ng; ++i) {
        lap(i, i) = 2.0 * grid.dimension() * inv_h2;
        const auto idx = grid.multi_index(i);
        for (int a = 0; a < grid.dimension(); ++a) {
            if (idx[a] + 1 < n) {
                auto next = idx;
                next[a] += 1;
                const auto j = grid.flat_index(next);
                lap(i, j) = lap(j, i) = -inv_h2;
            }
        }
    }
    return lap;
}

KernelOperator free_hamiltonian(std::shared_ptr<const Grid> grid, const RealVector& vn) {
    if (vn.size() != grid->size()) {
        throw std::invalid_argument("nuclear potential size does not match grid");
    }
    Eigen::MatrixXd action = negative_laplacian(*grid);
    action.diagonal() += kElectronCharge * vn;
    return KernelOperator::from_action(std::move(grid), action.cast<Complex>());
}

System make_system(const Grid& grid, Nuclei nuclei, double softening, bool coupling) {
    auto shared = std::make_shared<const Grid>(grid);
    RealVector vn = nuclear_potential(grid, nuclei, softening);
    Eigen::MatrixXd lap = negative_laplacian(grid);
    KernelOperator h0 = free_hamiltonian(shared, vn);
    return System{shared,         std::move(nuclei), CoulombKernel::build(grid, softening), std::move(vn),
                  std::move(lap), std::move(h0),     coupling};
}

}  // namespace wavehf
