#pragma once

#include <cstdint>
#include <random>

#include "wavehf/kernel_operator.hpp"

namespace wavehf {

using Rng = std::mt19937_64;

/// Complex Gaussian entries, rescaled to the requested H0 norm.
KernelOperator random_kernel(std::shared_ptr<const Grid> grid, Rng& rng, double hs_norm_target);

/// Hermitian kernel (G + G*)/2 with Gaussian G, rescaled to the requested H0 norm.
KernelOperator random_hermitian(std::shared_ptr<const Grid> grid, Rng& rng, double hs_norm_target);

/// exp(-i A) for a random Hermitian A of action-matrix Frobenius norm `strength`.
KernelOperator random_unitary(std::shared_ptr<const Grid> grid, Rng& rng, double strength = 1.0);

}  // namespace wavehf
