#include "wavehf/energy.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

#include "wavehf/meanfield.hpp"
#include "wavehf/random.hpp"

namespace wavehf {

EnergyBreakdown density_matrix_energy(const System& system, const KernelOperator& k, EnergyMode mode) {
    require_same_grid(system.h0, k);
    const double hd = system.grid->cell_volume();
    const auto& kv = k.values();

    EnergyBreakdown e;
    // tr(-Lap o K) = h^d sum_ik L_ik K_ki
    e.kinetic = 0.5 * hd * (system.neg_laplacian.array() * kv.transpose().real().array()).sum();
    const RealVector rho = kElectronCharge * kv.diagonal().real();
    e.nuclear = 0.5 * hd * system.vn.dot(rho);
    if (system.coupling) {
        e.hartree = 0.25 * hd * hd * rho.dot(system.kernel.values() * rho);
        if (mode == EnergyMode::full) {
            // |tau|^2 = e^2 |K|^2
            const double e2 = kElectronCharge * kElectronCharge;
            e.exchange = -0.25 * hd * hd * e2 * (kv.cwiseAbs2().array() * system.kernel.values().array()).sum();
        }
    }
    e.total = e.kinetic + e.nuclear + e.hartree + e.exchange;
    return e;
}

EnergyBreakdown energy(const System& system, const KernelOperator& w, EnergyMode mode) {
    return density_matrix_energy(system, density_matrices(w).ktilde, mode);
}

double energy_difference(const System& system, const KernelOperator& w, const KernelOperator& w_new,
                         EnergyMode mode) {
    require_same_grid(w, w_new);
    require_same_grid(system.h0, w);
    const double hd = system.grid->cell_volume();
    const KernelOperator d = w_new - w;
    const KernelOperator dstar = d.adjoint();
    const KernelOperator wstar = w.adjoint();
    // Ktilde(w + d) - Ktilde(w), expanded in d
    const ComplexMatrix dk =
        0.5 * hd *
        (w.values() * dstar.values() + d.values() * wstar.values() + d.values() * dstar.values() +
         wstar.values() * d.values() + dstar.values() * w.values() + dstar.values() * d.values());
    const DensityMatrices dm = density_matrices(w);
    const ComplexMatrix& k = dm.ktilde.values();

    double out = 0.5 * hd * (system.neg_laplacian.array() * dk.transpose().real().array()).sum();
    const RealVector drho = kElectronCharge * dk.diagonal().real();
    out += 0.5 * hd * system.vn.dot(drho);
    if (system.coupling) {
        const RealVector rho = kElectronCharge * k.diagonal().real();
        const Eigen::MatrixXd& c = system.kernel.values();
        out += 0.25 * hd * hd * (2.0 * drho.dot(c * rho) + drho.dot(c * drho));
        if (mode == EnergyMode::full) {
            // |K + dK|^2 - |K|^2 = 2 Re(conj(K) dK) + |dK|^2, times e^2 = 1
            const Eigen::ArrayXXd cross = (k.conjugate().array() * dk.array()).real();
            out -= 0.25 * hd * hd * ((2.0 * cross + dk.array().abs2()) * c.array()).sum();
        }
    }
    return out;
}

QuadraticTerms quadratic_terms_from_kernel(const System& system, const KernelOperator& w) {
    require_same_grid(system.h0, w);
    const Grid& grid = *system.grid;
    const auto& v = w.values();
    const Eigen::Index ng = grid.size();
    const int n = grid.points_per_axis();
    const int d = grid.dimension();
    const double hd = grid.cell_volume();
    const double h = grid.spacing();

    // Sum over Dirichlet edges of one axis: interior differences plus the two
    // boundary edges against zero ghosts.
    double grad2 = 0.0;
    for (Eigen::Index p = 0; p < ng; ++p) {
        const auto idx = grid.multi_index(p);
        for (int a = 0; a < d; ++a) {
            const bool first = idx[a] == 0;
            const bool last = idx[a] == n - 1;
            Eigen::Index next = -1;
            if (!last) {
                auto m = idx;
                m[a] += 1;
                next = grid.flat_index(m);
            }
            for (Eigen::Index q = 0; q < ng; ++q) {
                // derivative in the row coordinate x
                const Complex wx = v(p, q);
                grad2 += (last ? std::norm(wx) : std::norm(v(next, q) - wx)) + (first ? std::norm(wx) : 0.0);
                // derivative in the column coordinate y
                const Complex wy = v(q, p);
                grad2 += (last ? std::norm(wy) : std::norm(v(q, next) - wy)) + (first ? std::norm(wy) : 0.0);
            }
        }
    }

    double pot = 0.0;
    for (Eigen::Index j = 0; j < ng; ++j) {
        for (Eigen::Index i = 0; i < ng; ++i) {
            pot += (system.vn(i) + system.vn(j)) * std::norm(v(i, j));
        }
    }

    QuadraticTerms out;
    out.kinetic = 0.25 * hd * hd * grad2 / (h * h);
    out.nuclear = 0.25 * kElectronCharge * hd * hd * pot;
    return out;
}

KernelOperator gradient(const System& system, const KernelOperator& w, EnergyMode mode) {
    const MeanField mf = assemble_hamiltonian(system, w, mode == EnergyMode::full);
    return anticommutator(mf.hq, w);
}

namespace {

void require_step(double step) {
    if (!(step >= 1e-7 && step <= 1e-3)) {
        throw std::invalid_argument("finite-difference step must lie in [1e-7, 1e-3]");
    }
}

Complex fd_entry(const System& system, const KernelOperator& w, EnergyMode mode, double step, Eigen::Index i,
                 Eigen::Index j) {
    const auto eval = [&](Complex delta) {
        ComplexMatrix v = w.values();
        v(i, j) += delta;
        return energy(system, KernelOperator(w.grid_ptr(), std::move(v)), mode).total;
    };
    const double d_re = (eval({step, 0.0}) - eval({-step, 0.0})) / (2.0 * step);
    const double d_im = (eval({0.0, step}) - eval({0.0, -step})) / (2.0 * step);
    const double hd = w.grid().cell_volume();
    return 2.0 * Complex(d_re, d_im) / (hd * hd);
}

}  // namespace

KernelOperator gradient_fd_oracle(const System& system, const KernelOperator& w, EnergyMode mode,
                                  double step) {
    require_step(step);
    require_same_grid(system.h0, w);
    const auto ng = w.size();
    ComplexMatrix out(ng, ng);
    for (Eigen::Index j = 0; j < ng; ++j) {
        for (Eigen::Index i = 0; i < ng; ++i) {
            out(i, j) = fd_entry(system, w, mode, step, i, j);
        }
    }
    return KernelOperator(w.grid_ptr(), std::move(out));
}

std::vector<FdSample> gradient_fd_sample(const System& system, const KernelOperator& w, EnergyMode mode,
                                         double step, std::size_t count, std::uint64_t seed) {
    require_step(step);
    require_same_grid(system.h0, w);
    const auto ng = static_cast<std::size_t>(w.size());
    const std::size_t total = ng * ng;
    count = std::min(count, total);

    std::vector<std::size_t> flat(total);
    std::iota(flat.begin(), flat.end(), std::size_t{0});
    Rng rng(seed);
    // partial Fisher-Yates
    for (std::size_t k = 0; k < count; ++k) {
        std::uniform_int_distribution<std::size_t> pick(k, total - 1);
        std::swap(flat[k], flat[pick(rng)]);
    }

    std::vector<FdSample> samples;
    samples.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const auto i = static_cast<Eigen::Index>(flat[k] / ng);
        const auto j = static_cast<Eigen::Index>(flat[k] % ng);
        samples.push_back(FdSample{i, j, fd_entry(system, w, mode, step, i, j)});
    }
    return samples;
}

std::vector<FdSample> gradient_fd_check_entries(const System& system, const KernelOperator& w,
                                                EnergyMode mode, double step, std::uint64_t seed) {
    const auto ng = w.size();
    if (ng <= 24) {
        const KernelOperator full = gradient_fd_oracle(system, w, mode, step);
        std::vector<FdSample> samples;
        samples.reserve(static_cast<std::size_t>(ng * ng));
        for (Eigen::Index i = 0; i < ng; ++i) {
            for (Eigen::Index j = 0; j < ng; ++j) {
                samples.push_back(FdSample{i, j, full(i, j)});
            }
        }
        return samples;
    }
    const std::size_t count = std::max<std::size_t>(200, static_cast<std::size_t>(ng));
    return gradient_fd_sample(system, w, mode, step, count, seed);
}

double max_relative_deviation(const KernelOperator& analytic, const std::vector<FdSample>& samples) {
    const double scale = analytic.values().cwiseAbs().maxCoeff();
    double worst = 0.0;
    for (const auto& s : samples) {
        worst = std::max(worst, std::abs(analytic(s.row, s.col) - s.value));
    }
    return scale > 0.0 ? worst / scale : worst;
}

}  // namespace wavehf
