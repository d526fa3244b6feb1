#include "wavehf/random.hpp"

#include <stdexcept>

#include "wavehf/norms.hpp"

namespace wavehf {
namespace {

ComplexMatrix gaussian_matrix(Eigen::Index ng, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix m(ng, ng);
    for (Eigen::Index j = 0; j < ng; ++j) {
        for (Eigen::Index i = 0; i < ng; ++i) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(i, j) = Complex(re, im);
        }
    }
    return m;
}

KernelOperator rescaled(KernelOperator w, double target) {
    const double norm = hs_norm(w);
    if (norm == 0.0) {
        throw std::invalid_argument("cannot rescale a zero kernel");
    }
    return std::move(w) * Complex(target / norm, 0.0);
}

}  // namespace

KernelOperator random_kernel(std::shared_ptr<const Grid> grid, Rng& rng, double hs_norm_target) {
    const auto ng = grid->size();
    return rescaled(KernelOperator(std::move(grid), gaussian_matrix(ng, rng)), hs_norm_target);
}

KernelOperator random_hermitian(std::shared_ptr<const Grid> grid, Rng& rng, double hs_norm_target) {
    const auto ng = grid->size();
    const ComplexMatrix g = gaussian_matrix(ng, rng);
    return rescaled(KernelOperator(std::move(grid), 0.5 * (g + g.adjoint())), hs_norm_target);
}

KernelOperator random_unitary(std::shared_ptr<const Grid> grid, Rng& rng, double strength) {
    const auto ng = grid->size();
    const ComplexMatrix g = gaussian_matrix(ng, rng);
    ComplexMatrix a = 0.5 * (g + g.adjoint());
    a *= strength / a.norm();
    return unitary_exp(KernelOperator::from_action(std::move(grid), a), 1.0);
}

}  // namespace wavehf
