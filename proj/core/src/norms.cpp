#include "wavehf/norms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace wavehf {
namespace {

// Kernel coordinate q in [0, 2d): q < d is an axis of the row point x,
// otherwise axis (q - d) of the column point y.
class KernelShifter {
public:
    explicit KernelShifter(const Grid& grid) : grid_(grid) {}

    std::optional<std::pair<Eigen::Index, Eigen::Index>> shift(Eigen::Index i, Eigen::Index j, int q,
                                                               int steps) const {
        const int d = grid_.dimension();
        const bool on_row = q < d;
        const int axis = on_row ? q : q - d;
        auto idx = grid_.multi_index(on_row ? i : j);
        idx[axis] += steps;
        if (idx[axis] >= grid_.points_per_axis()) {
            return std::nullopt;
        }
        const auto moved = grid_.flat_index(idx);
        return on_row ? std::make_pair(moved, j) : std::make_pair(i, moved);
    }

private:
    const Grid& grid_;
};

}  // namespace

SobolevNorms sobolev_norms(const KernelOperator& w) {
    const Grid& grid = w.grid();
    const auto& v = w.values();
    const Eigen::Index ng = grid.size();
    const int coords = 2 * grid.dimension();
    const double h = grid.spacing();
    const double weight = grid.cell_volume() * grid.cell_volume();
    const KernelShifter shifter(grid);

    double s0 = v.squaredNorm();
    double s1 = 0.0;
    double s2 = 0.0;

    for (Eigen::Index j = 0; j < ng; ++j) {
        for (Eigen::Index i = 0; i < ng; ++i) {
            const Complex base = v(i, j);
            for (int q = 0; q < coords; ++q) {
                const auto a = shifter.shift(i, j, q, 1);
                if (!a) {
                    continue;
                }
                const Complex fq = v(a->first, a->second);
                s1 += std::norm((fq - base) / h);

                for (int r = q; r < coords; ++r) {
                    // f(1,1) - f(1,0) - f(0,1) + f(0,0) along coordinates q, r.
                    const auto b = shifter.shift(i, j, r, 1);
                    if (!b) {
                        continue;
                    }
                    const auto ab = shifter.shift(a->first, a->second, r, 1);
                    if (!ab) {
                        continue;
                    }
                    const Complex second = v(ab->first, ab->second) - fq - v(b->first, b->second) + base;
                    s2 += std::norm(second / (h * h));
                }
            }
        }
    }

    SobolevNorms out;
    out.h0 = std::sqrt(weight * s0);
    out.h1 = std::sqrt(weight * (s0 + s1));
    out.h2 = std::sqrt(weight * (s0 + s1 + s2));
    return out;
}

double operator_norm(const KernelOperator& w) {
    // largest eigenvalue of a* a; the top singular value keeps full relative accuracy
    const ComplexMatrix a = w.action();
    const ComplexMatrix gram = a.adjoint() * a;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (gram + gram.adjoint()), Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return ev.size() > 0 ? std::sqrt(std::max(ev(ev.size() - 1), 0.0)) : 0.0;
}

RealVector singular_values(const KernelOperator& w) {
    Eigen::BDCSVD<ComplexMatrix> fast(w.action());
    if (fast.singularValues().allFinite()) {
        return fast.singularValues();
    }
    return Eigen::JacobiSVD<ComplexMatrix>(w.action()).singularValues();
}

SpectralBounds spectral_bounds(const KernelOperator& k) {
    const ComplexMatrix a = k.action();
    const ComplexMatrix sym = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
    const auto& ev = solver.eigenvalues();
    return SpectralBounds{ev(0), ev(ev.size() - 1)};
}

KernelOperator unitary_exp(const KernelOperator& a, double t) {
    const ComplexMatrix act = a.action();
    const ComplexMatrix sym = 0.5 * (act + act.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    const auto& vecs = solver.eigenvectors();
    const Eigen::VectorXcd phases =
        (solver.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
    const ComplexMatrix u = vecs * phases.asDiagonal() * vecs.adjoint();
    return KernelOperator::from_action(a.grid_ptr(), u);
}

double unitarity_defect(const KernelOperator& u) {
    const auto id = KernelOperator::identity(u.grid_ptr());
    return hs_norm(compose(u.adjoint(), u) - id) / hs_norm(id);
}

}  // namespace wavehf
