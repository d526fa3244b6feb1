#pragma once

#include <complex>
#include <memory>

#include <Eigen/Core>

#include "wavehf/grid.hpp"

namespace wavehf {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Dense integral kernel w(x_i, x_j) on a grid.
///
/// One representation serves wave matrices, density matrices, Hamiltonians and
/// multiplication operators. Conventions, with h^d the cell volume:
///   action       (w psi)_i  = h^d sum_j w_ij psi_j
///   composition  (u o v)_ij = h^d sum_k u_ik v_kj
///   adjoint      (w*)_ij    = conj(w_ji)
///   trace        tr w       = h^d sum_i w_ii
///   HS product   <u, v>     = h^{2d} sum_ij conj(u_ij) v_ij
/// A multiplication operator by f(x) has the diagonal kernel f(x_i) / h^d.
class KernelOperator {
public:
    /// Throws std::invalid_argument if the shape is not Ng x Ng.
    KernelOperator(std::shared_ptr<const Grid> grid, ComplexMatrix values);

    static KernelOperator zero(std::shared_ptr<const Grid> grid);
    static KernelOperator identity(std::shared_ptr<const Grid> grid);
    static KernelOperator multiplication(std::shared_ptr<const Grid> grid, const RealVector& f);
    /// Builds the kernel whose action matrix is `action`, i.e. values = action / h^d.
    static KernelOperator from_action(std::shared_ptr<const Grid> grid, const ComplexMatrix& action);

    const Grid& grid() const noexcept { return *grid_; }
    const std::shared_ptr<const Grid>& grid_ptr() const noexcept { return grid_; }
    const ComplexMatrix& values() const noexcept { return values_; }
    Eigen::Index size() const noexcept { return values_.rows(); }
    Complex operator()(Eigen::Index i, Eigen::Index j) const { return values_(i, j); }

    /// The matrix h^d * w_ij acting on grid vectors.
    ComplexMatrix action() const { return grid_->cell_volume() * values_; }

    KernelOperator adjoint() const;
    bool is_finite() const { return values_.allFinite(); }

    KernelOperator& operator+=(const KernelOperator& other);
    KernelOperator& operator-=(const KernelOperator& other);
    KernelOperator& operator*=(Complex scale);

private:
    std::shared_ptr<const Grid> grid_;
    ComplexMatrix values_;
};

KernelOperator operator+(KernelOperator a, const KernelOperator& b);
KernelOperator operator-(KernelOperator a, const KernelOperator& b);
KernelOperator operator*(Complex scale, KernelOperator a);
KernelOperator operator*(KernelOperator a, Complex scale);

/// Throws std::invalid_argument when the operators live on different grids.
void require_same_grid(const KernelOperator& a, const KernelOperator& b);

KernelOperator compose(const KernelOperator& u, const KernelOperator& v);
KernelOperator compose(const KernelOperator& a, const KernelOperator& b, const KernelOperator& c);

/// {A, w} = A o w + w o A.
KernelOperator anticommutator(const KernelOperator& a, const KernelOperator& w);
/// [A, B] = A o B - B o A.
KernelOperator commutator(const KernelOperator& a, const KernelOperator& b);

Complex trace(const KernelOperator& w);
Complex hs_inner(const KernelOperator& u, const KernelOperator& v);
double hs_norm(const KernelOperator& w);

struct DensityMatrices {
    KernelOperator k;       ///< w o w*
    KernelOperator ktilde;  ///< (w o w* + w* o w) / 2
};

DensityMatrices density_matrices(const KernelOperator& w);

/// (A + A*) / 2.
KernelOperator hermitian_part(const KernelOperator& a);

/// Largest |A_ij - conj(A_ji)| relative to max |A_ij| (absolute when A = 0).
double hermiticity_defect(const KernelOperator& a);

}  // namespace wavehf
