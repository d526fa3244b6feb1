#include "wavehf/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "wavehf/error.hpp"
#include "wavehf/meanfield.hpp"
#include "wavehf/random.hpp"

namespace wavehf {
namespace {

void require_electron_count(int n, const Grid& grid) {
    if (n < 0) {
        throw std::invalid_argument("electron count must be nonnegative");
    }
    if (n > grid.size()) {
        throw std::invalid_argument("electron count exceeds the number of grid points");
    }
}

struct Aufbau {
    KernelOperator projector;
    RealVector eigenvalues;
};

Aufbau aufbau(const KernelOperator& hamiltonian, int n, bool check_gap) {
    const ComplexMatrix act = hamiltonian.action();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (act + act.adjoint()));
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition of the mean-field operator failed");
    }
    const auto& ev = solver.eigenvalues();
    if (check_gap && n > 0 && n < ev.size() && ev(n) - ev(n - 1) < 1e-10) {
        std::ostringstream msg;
        msg << "degenerate HOMO-LUMO gap " << ev(n) - ev(n - 1) << "; fractional occupation is not supported";
        throw NumericalError(msg.str());
    }
    const ComplexMatrix occ = solver.eigenvectors().leftCols(n);
    return Aufbau{KernelOperator::from_action(hamiltonian.grid_ptr(), occ * occ.adjoint()), ev};
}

}  // namespace

void ScfConfig::validate(const Grid& grid) const {
    require_electron_count(electron_count, grid);
    if (max_iter < 1) {
        throw std::invalid_argument("SCF max_iter must be positive");
    }
    if (!(mixing > 0.0 && mixing <= 1.0)) {
        throw std::invalid_argument("SCF mixing must lie in (0, 1]");
    }
    if (!(energy_tol > 0.0) || !(density_tol > 0.0)) {
        throw std::invalid_argument("SCF tolerances must be positive");
    }
}

KernelOperator aufbau_projector(const KernelOperator& hamiltonian, int electron_count) {
    require_electron_count(electron_count, hamiltonian.grid());
    return aufbau(hamiltonian, electron_count, false).projector;
}

ScfResult scf_ground_state(const System& system, const ScfConfig& config) {
    config.validate(*system.grid);
    const int n = config.electron_count;
    const bool exchange = config.mode == EnergyMode::full;
    if (n == 0) {
        return ScfResult{KernelOperator::zero(system.grid), 0.0, 0, 0.0, 0.0, RealVector()};
    }

    KernelOperator k = aufbau(system.h0, n, true).projector;
    double e = density_matrix_energy(system, k, config.mode).total;
    double de = 0.0;
    double dk = 0.0;
    for (int it = 1; it <= config.max_iter; ++it) {
        const KernelOperator h = density_matrix_hamiltonian(system, k, exchange);
        Aufbau next = aufbau(h, n, true);
        const double e_next = density_matrix_energy(system, next.projector, config.mode).total;
        de = std::abs(e_next - e);
        dk = hs_norm(next.projector - k);
        if (de < config.energy_tol && dk < config.density_tol) {
            return ScfResult{std::move(next.projector), e_next, it, de, dk, std::move(next.eigenvalues)};
        }
        // The energy along k + s d is exactly e + a s + b s^2, so take the best s in [0, 1].
        // Plain fixed mixing is unstable when the highest occupied level is barely bound.
        const KernelOperator d = next.projector - k;
        const double a = 0.5 * trace(compose(h, d)).real();
        const EnergyBreakdown quad = density_matrix_energy(system, d, config.mode);
        const double b = quad.hartree + quad.exchange;
        double s = config.mixing;
        if (a < 0.0) {
            s = b > 0.0 ? std::min(1.0, -a / (2.0 * b)) : 1.0;
        }
        k += s * d;
        e = density_matrix_energy(system, k, config.mode).total;
    }
    std::ostringstream msg;
    msg << "SCF did not converge in " << config.max_iter << " iterations (last dE " << de << ", last dK " << dk
        << ")";
    throw NumericalError(msg.str());
}

void MinimizerConfig::validate(const Grid& grid) const {
    require_electron_count(electron_count, grid);
    if (!(step_size > 0.0) || !(grad_tol > 0.0) || !(probe_step > 0.0)) {
        throw std::invalid_argument("minimizer step, tolerance and probe must be positive");
    }
    if (!(backtrack > 0.0 && backtrack < 1.0)) {
        throw std::invalid_argument("backtracking factor must lie in (0, 1)");
    }
    if (max_iter < 1) {
        throw std::invalid_argument("minimizer max_iter must be positive");
    }
}

namespace {

// Common scale r with sigma' = min(1, r sigma) and sum sigma'^2 = n.
// sigma is sorted descending.
RealVector project_singular_values(const RealVector& sigma, int n) {
    const Eigen::Index m = sigma.size();
    const auto clipped_mass = [&](double r) { return (r * sigma).cwiseMin(1.0).squaredNorm(); };

    Eigen::Index positive = 0;
    while (positive < m && sigma(positive) > 0.0) {
        ++positive;
    }
    if (positive < n) {
        throw NumericalError("wave matrix has fewer nonzero singular values than electrons");
    }
    if (positive == n) {
        RealVector out = RealVector::Zero(m);
        out.head(n).setOnes();
        return out;
    }

    RealVector tail(m + 1);
    tail(m) = 0.0;
    for (Eigen::Index i = m - 1; i >= 0; --i) {
        tail(i) = tail(i + 1) + sigma(i) * sigma(i);
    }
    // k = number of clipped values
    for (Eigen::Index k = 0; k < n; ++k) {
        const double r = std::sqrt((n - static_cast<double>(k)) / tail(k));
        if ((k == 0 || r * sigma(k - 1) >= 1.0) && r * sigma(k) <= 1.0) {
            return (r * sigma).cwiseMin(1.0);
        }
    }
    // Ties at the clip boundary: bisect the monotone clipped mass.
    double lo = 0.0;
    double hi = 1.0 / sigma(0);
    while (clipped_mass(hi) < n) {
        hi *= 2.0;
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (clipped_mass(mid) < n ? lo : hi) = mid;
    }
    return (hi * sigma).cwiseMin(1.0);
}

}  // namespace

KernelOperator project_feasible(const KernelOperator& w, int electron_count) {
    require_electron_count(electron_count, w.grid());
    if (electron_count == 0) {
        return KernelOperator::zero(w.grid_ptr());
    }
    const auto project = [&](const auto& svd) {
        const RealVector sigma = project_singular_values(svd.singularValues(), electron_count);
        const ComplexMatrix act = svd.matrixU() * sigma.cast<Complex>().asDiagonal() * svd.matrixV().adjoint();
        return KernelOperator::from_action(w.grid_ptr(), act);
    };
    constexpr int options = Eigen::ComputeThinU | Eigen::ComputeThinV;
    Eigen::BDCSVD<ComplexMatrix> fast(w.action(), options);
    if (fast.singularValues().allFinite() && fast.matrixU().allFinite() && fast.matrixV().allFinite()) {
        return project(fast);
    }
    // divide and conquer occasionally returns NaN on finite input; Jacobi is slower but robust
    if (!w.is_finite()) {
        throw NumericalError("cannot project a non-finite wave matrix");
    }
    return project(Eigen::JacobiSVD<ComplexMatrix>(w.action(), options));
}

double projected_gradient_norm(const System& system, const KernelOperator& w, int electron_count,
                               EnergyMode mode, double probe_step) {
    const KernelOperator g = gradient(system, w, mode);
    const KernelOperator moved = project_feasible(w - probe_step * g, electron_count);
    return hs_norm(w - moved) / probe_step;
}

KernelOperator random_feasible(std::shared_ptr<const Grid> grid, int electron_count, std::uint64_t seed) {
    Rng rng(seed);
    KernelOperator w = random_kernel(grid, rng, 1.0);
    return project_feasible(w, electron_count);
}

MinimizerResult wavematrix_ground_state(const System& system, const MinimizerConfig& config,
                                        const std::optional<KernelOperator>& init) {
    config.validate(*system.grid);
    const int n = config.electron_count;
    if (n == 0) {
        return MinimizerResult{KernelOperator::zero(system.grid), 0.0, 0, 0.0, {0.0}};
    }

    KernelOperator w = init ? project_feasible(*init, n) : random_feasible(system.grid, n, config.seed);
    double e = energy(system, w, config.mode).total;
    std::vector<double> history{e};

    std::optional<KernelOperator> w_prev;
    std::optional<KernelOperator> g_prev;
    double pg = 0.0;
    for (int it = 0; it < config.max_iter; ++it) {
        const KernelOperator g = gradient(system, w, config.mode);
        pg = hs_norm(w - project_feasible(w - config.probe_step * g, n)) / config.probe_step;
        if (pg < config.grad_tol) {
            e = energy(system, w, config.mode).total;
            return MinimizerResult{std::move(w), e, it, pg, std::move(history)};
        }

        double eta = config.step_size;
        if (w_prev) {
            const KernelOperator s = w - *w_prev;
            const KernelOperator y = g - *g_prev;
            const double sy = hs_inner(s, y).real();
            const double ss = hs_inner(s, s).real();
            if (sy != 0.0 && ss > 0.0) {
                eta = std::clamp(std::abs(ss / sy), 1e-10, 100.0 * config.step_size);
            }
        }

        // The projection leaves O(eps) roundoff off the constraint surface, where the
        // full gradient is not small; energy changes below this level are noise.
        const double noise = 16.0 * std::numeric_limits<double>::epsilon() * hs_norm(g) * hs_norm(w);
        bool accepted = false;
        while (eta > 1e-16) {
            KernelOperator trial = project_feasible(w - eta * g, n);
            const double change = energy_difference(system, w, trial, config.mode);
            if (change <= noise) {
                w_prev = std::move(w);
                g_prev = g;
                w = std::move(trial);
                e += change;
                history.push_back(e);
                accepted = true;
                break;
            }
            eta *= config.backtrack;
        }
        if (!accepted) {
            std::ostringstream msg;
            msg << "wave-matrix minimizer stalled at iteration " << it << " (projected gradient " << pg << ")";
            throw NumericalError(msg.str());
        }
    }
    std::ostringstream msg;
    msg << "wave-matrix minimizer did not converge in " << config.max_iter << " iterations (projected gradient "
        << pg << ")";
    throw NumericalError(msg.str());
}

EquivalenceReport equivalence_report(const System& system, const ScfConfig& scf, const MinimizerConfig& min) {
    const ScfResult s = scf_ground_state(system, scf);
    const MinimizerResult m = wavematrix_ground_state(system, min);
    EquivalenceReport r;
    r.e_scf = s.energy;
    r.e_wm = m.energy;
    r.abs_diff = std::abs(s.energy - m.energy);
    r.scf_iterations = s.iterations;
    r.wm_iterations = m.iterations;
    r.wm_projected_gradient = m.projected_gradient;
    r.singular_values = singular_values(m.wave_matrix);
    r.ktilde_bounds = spectral_bounds(density_matrices(m.wave_matrix).ktilde);
    return r;
}

}  // namespace wavehf
