#include "wavehf/kernel_operator.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace wavehf {

KernelOperator::KernelOperator(std::shared_ptr<const Grid> grid, ComplexMatrix values)
    : grid_(std::move(grid)), values_(std::move(values)) {
    if (!grid_) {
        throw std::invalid_argument("kernel operator needs a grid");
    }
    const auto ng = grid_->size();
    if (values_.rows() != ng || values_.cols() != ng) {
        throw std::invalid_argument("kernel shape " + std::to_string(values_.rows()) + "x" +
                                    std::to_string(values_.cols()) + " does not match grid size " +
                                    std::to_string(ng));
    }
}

KernelOperator KernelOperator::zero(std::shared_ptr<const Grid> grid) {
    const auto ng = grid->size();
    return KernelOperator(std::move(grid), ComplexMatrix::Zero(ng, ng));
}

KernelOperator KernelOperator::identity(std::shared_ptr<const Grid> grid) {
    const auto ng = grid->size();
    const double inv = 1.0 / grid->cell_volume();
    return KernelOperator(std::move(grid), ComplexMatrix::Identity(ng, ng) * inv);
}

KernelOperator KernelOperator::multiplication(std::shared_ptr<const Grid> grid, const RealVector& f) {
    if (f.size() != grid->size()) {
        throw std::invalid_argument("multiplication operator: function size does not match grid");
    }
    const double inv = 1.0 / grid->cell_volume();
    ComplexMatrix values = ComplexMatrix::Zero(grid->size(), grid->size());
    values.diagonal() = (f * inv).cast<Complex>();
    return KernelOperator(std::move(grid), std::move(values));
}

KernelOperator KernelOperator::from_action(std::shared_ptr<const Grid> grid, const ComplexMatrix& action) {
    const double inv = 1.0 / grid->cell_volume();
    return KernelOperator(std::move(grid), action * inv);
}

KernelOperator KernelOperator::adjoint() const {
    return KernelOperator(grid_, values_.adjoint());
}

KernelOperator& KernelOperator::operator+=(const KernelOperator& other) {
    require_same_grid(*this, other);
    values_ += other.values_;
    return *this;
}

KernelOperator& KernelOperator::operator-=(const KernelOperator& other) {
    require_same_grid(*this, other);
    values_ -= other.values_;
    return *this;
}

KernelOperator& KernelOperator::operator*=(Complex scale) {
    values_ *= scale;
    return *this;
}

KernelOperator operator+(KernelOperator a, const KernelOperator& b) { return a += b; }
KernelOperator operator-(KernelOperator a, const KernelOperator& b) { return a -= b; }
KernelOperator operator*(Complex scale, KernelOperator a) { return a *= scale; }
KernelOperator operator*(KernelOperator a, Complex scale) { return a *= scale; }

void require_same_grid(const KernelOperator& a, const KernelOperator& b) {
    if (a.grid_ptr() != b.grid_ptr() && !(a.grid() == b.grid())) {
        throw std::invalid_argument("kernel operators live on different grids");
    }
}

KernelOperator compose(const KernelOperator& u, const KernelOperator& v) {
    require_same_grid(u, v);
    ComplexMatrix out = u.grid().cell_volume() * (u.values() * v.values());
    return KernelOperator(u.grid_ptr(), std::move(out));
}

KernelOperator compose(const KernelOperator& a, const KernelOperator& b, const KernelOperator& c) {
    return compose(compose(a, b), c);
}

KernelOperator anticommutator(const KernelOperator& a, const KernelOperator& w) {
    require_same_grid(a, w);
    ComplexMatrix out = a.values() * w.values();
    out.noalias() += w.values() * a.values();
    out *= a.grid().cell_volume();
    return KernelOperator(a.grid_ptr(), std::move(out));
}

KernelOperator commutator(const KernelOperator& a, const KernelOperator& b) {
    require_same_grid(a, b);
    ComplexMatrix out = a.values() * b.values();
    out.noalias() -= b.values() * a.values();
    out *= a.grid().cell_volume();
    return KernelOperator(a.grid_ptr(), std::move(out));
}

Complex trace(const KernelOperator& w) {
    return w.grid().cell_volume() * w.values().trace();
}

Complex hs_inner(const KernelOperator& u, const KernelOperator& v) {
    require_same_grid(u, v);
    const double hd = u.grid().cell_volume();
    // Eigen's dot is conjugate-linear in the first argument.
    const Complex sum = Eigen::Map<const Eigen::VectorXcd>(u.values().data(), u.values().size())
                            .dot(Eigen::Map<const Eigen::VectorXcd>(v.values().data(), v.values().size()));
    return hd * hd * sum;
}

double hs_norm(const KernelOperator& w) {
    return w.grid().cell_volume() * w.values().norm();
}

DensityMatrices density_matrices(const KernelOperator& w) {
    const double hd = w.grid().cell_volume();
    ComplexMatrix wwstar = hd * (w.values() * w.values().adjoint());
    ComplexMatrix wstarw = hd * (w.values().adjoint() * w.values());
    ComplexMatrix ktilde = 0.5 * (wwstar + wstarw);
    return DensityMatrices{KernelOperator(w.grid_ptr(), std::move(wwstar)),
                           KernelOperator(w.grid_ptr(), std::move(ktilde))};
}

KernelOperator hermitian_part(const KernelOperator& a) {
    ComplexMatrix sym = 0.5 * (a.values() + a.values().adjoint());
    return KernelOperator(a.grid_ptr(), std::move(sym));
}

double hermiticity_defect(const KernelOperator& a) {
    const double defect = (a.values() - a.values().adjoint()).cwiseAbs().maxCoeff();
    const double scale = a.values().cwiseAbs().maxCoeff();
    return scale > 0.0 ? defect / scale : defect;
}

}  // namespace wavehf
