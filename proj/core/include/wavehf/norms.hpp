#pragma once

#include "wavehf/kernel_operator.hpp"

namespace wavehf {

/// Discrete Sobolev norms of a kernel in the 2d coordinates (x, y).
struct SobolevNorms {
    double h0 = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
};

/// Sums |d^alpha w|^2 over all multi-indices |alpha| <= 2 with weight one.
/// Derivatives are forward difference quotients; terms whose stencil leaves the
/// grid are omitted.
SobolevNorms sobolev_norms(const KernelOperator& w);

/// Largest singular value of the action matrix.
double operator_norm(const KernelOperator& w);

/// Singular values of the action matrix, descending.
RealVector singular_values(const KernelOperator& w);

struct SpectralBounds {
    double min_eig = 0.0;
    double max_eig = 0.0;
};

/// Extreme eigenvalues of the Hermitian part of the action matrix.
SpectralBounds spectral_bounds(const KernelOperator& k);

/// exp(-i t A) for Hermitian A (its Hermitian part is used).
KernelOperator unitary_exp(const KernelOperator& a, double t);

/// || U* o U - I ||_H0 / || I ||_H0.
double unitarity_defect(const KernelOperator& u);

}  // namespace wavehf
