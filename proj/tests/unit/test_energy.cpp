#include <doctest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "wavehf/energy.hpp"
#include "wavehf/meanfield.hpp"
#include "wavehf/norms.hpp"
#include "wavehf/random.hpp"

using namespace wavehf;

namespace {

System small_system(bool coupling = true, int n = 16) {
    return make_system(Grid::build(1, n, 4.0), {Nucleus{{0.3, 0.0, 0.0}, 2}}, 0.5, coupling);
}

KernelOperator random_op(const System& sys, std::uint64_t seed, double scale = 0.1) {
    return KernelOperator(sys.grid, scale * oracle::random_matrix(sys.grid->size(), seed));
}

Eigen::MatrixXcd lowest_orbitals(const System& sys, int N) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sys.h0.action());
    return solver.eigenvectors().leftCols(N);
}

KernelOperator projector(const System& sys, const Eigen::MatrixXcd& v) {
    return KernelOperator::from_action(sys.grid, v * v.adjoint());
}

// Energy through explicit loops from Ktilde, independent of the library's matrix paths.
double energy_loop(const System& sys, const KernelOperator& w, bool exchange) {
    const double hd = sys.grid->cell_volume();
    const double e = kElectronCharge;
    const Eigen::MatrixXcd kt = 0.5 * (oracle::compose_loop(w.values(), w.values().adjoint(), hd) +
                                       oracle::compose_loop(w.values().adjoint(), w.values(), hd));
    const auto ng = sys.grid->size();
    double kin = 0.0, nuc = 0.0, har = 0.0, exc = 0.0;
    for (Eigen::Index i = 0; i < ng; ++i) {
        for (Eigen::Index k = 0; k < ng; ++k) {
            kin += sys.neg_laplacian(i, k) * kt(k, i).real();
        }
        nuc += sys.vn(i) * e * kt(i, i).real();
        for (Eigen::Index j = 0; j < ng; ++j) {
            har += e * kt(i, i).real() * sys.kernel(i, j) * e * kt(j, j).real();
            exc += std::norm(e * kt(i, j)) * sys.kernel(i, j);
        }
    }
    double total = 0.5 * hd * kin + 0.5 * hd * nuc + 0.25 * hd * hd * har;
    if (exchange) {
        total -= 0.25 * hd * hd * exc;
    }
    return total;
}

}  // namespace

TEST_CASE("energy of zero and of the lowest free orbital") {
    const System sys = small_system();
    const EnergyBreakdown zero = energy(sys, KernelOperator::zero(sys.grid), EnergyMode::full);
    CHECK(zero.total == 0.0);
    CHECK(zero.kinetic == 0.0);
    CHECK(zero.hartree == 0.0);
    CHECK(zero.exchange == 0.0);

    const System off = small_system(false);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(off.h0.action());
    const double lambda1 = solver.eigenvalues()(0);
    const KernelOperator w = projector(off, solver.eigenvectors().leftCols(1));
    for (auto mode : {EnergyMode::reduced, EnergyMode::full}) {
        CHECK(energy(off, w, mode).total == doctest::Approx(lambda1 / 2).epsilon(1e-12));
    }
}

TEST_CASE("energy matches the loop oracle and the breakdown is consistent") {
    const System sys = small_system();
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const KernelOperator w = random_op(sys, seed);
        for (auto mode : {EnergyMode::reduced, EnergyMode::full}) {
            const EnergyBreakdown e = energy(sys, w, mode);
            CHECK(e.total == doctest::Approx(energy_loop(sys, w, mode == EnergyMode::full)).epsilon(1e-12));
            CHECK(e.total == doctest::Approx(e.kinetic + e.nuclear + e.hartree + e.exchange).epsilon(1e-15));
            CHECK(e.hartree >= 0.0);
            CHECK(e.exchange <= 0.0);
            if (mode == EnergyMode::reduced) {
                CHECK(e.exchange == 0.0);
            }
        }
    }
}

TEST_CASE("Slater data: wave-matrix energy equals the density-matrix energy") {
    const System sys = small_system();
    const KernelOperator p = projector(sys, lowest_orbitals(sys, 2));
    for (auto mode : {EnergyMode::reduced, EnergyMode::full}) {
        const double e_w = energy(sys, p, mode).total;
        const double e_k = density_matrix_energy(sys, compose(p, p.adjoint()), mode).total;
        CHECK(e_w == doctest::Approx(e_k).epsilon(1e-12));
        CHECK(e_w == doctest::Approx(energy_loop(sys, p, mode == EnergyMode::full)).epsilon(1e-12));
    }
}

TEST_CASE("kernel route and trace route agree") {
    for (int d : {1, 2}) {
        const System sys = make_system(Grid::build(d, d == 1 ? 16 : 8, 3.0), {Nucleus{{0.1, -0.2, 0.0}, 1}}, 0.5);
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const KernelOperator w = random_op(sys, seed);
            const QuadraticTerms q = quadratic_terms_from_kernel(sys, w);
            const EnergyBreakdown e = energy(sys, w, EnergyMode::reduced);
            CHECK(std::abs(q.kinetic - e.kinetic) < 1e-10 * std::abs(e.kinetic));
            CHECK(std::abs(q.nuclear - e.nuclear) < 1e-10 * std::abs(e.nuclear));
        }
    }
}

TEST_CASE("scaling of the energy terms") {
    const System sys = small_system();
    const KernelOperator w = random_op(sys, 3);
    const EnergyBreakdown e1 = energy(sys, w, EnergyMode::full);
    for (double lambda : {-1.5, 0.5, 2.0}) {
        const EnergyBreakdown el = energy(sys, lambda * Complex(1.0) * w, EnergyMode::full);
        const double l2 = lambda * lambda;
        CHECK(el.kinetic == doctest::Approx(l2 * e1.kinetic).epsilon(1e-12));
        CHECK(el.nuclear == doctest::Approx(l2 * e1.nuclear).epsilon(1e-12));
        CHECK(el.hartree == doctest::Approx(l2 * l2 * e1.hartree).epsilon(1e-12));
        CHECK(el.exchange == doctest::Approx(l2 * l2 * e1.exchange).epsilon(1e-12));
    }
}

TEST_CASE("invariance under orbital rotations") {
    // Unitaries acting inside the occupied space leave a Slater projector's energy
    // unchanged. Right multiplication by any unitary leaves K = w w* unchanged.
    const System sys = small_system(true, 24);
    const Eigen::MatrixXcd v = lowest_orbitals(sys, 3);
    const KernelOperator p = projector(sys, v);
    const Eigen::MatrixXcd r = Eigen::HouseholderQR<Eigen::MatrixXcd>(oracle::random_matrix(3, 5)).householderQ();
    REQUIRE((r.adjoint() * r - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);

    // U = V R V* + (1 - V V*)
    const auto ng = sys.grid->size();
    const Eigen::MatrixXcd u_action = v * r * v.adjoint() + Eigen::MatrixXcd::Identity(ng, ng) - v * v.adjoint();
    REQUIRE((u_action.adjoint() * u_action - Eigen::MatrixXcd::Identity(ng, ng)).cwiseAbs().maxCoeff() < 1e-10);
    const KernelOperator u = KernelOperator::from_action(sys.grid, u_action);
    const KernelOperator up = compose(u, p);
    for (auto mode : {EnergyMode::reduced, EnergyMode::full}) {
        const double e0 = energy(sys, p, mode).total;
        CHECK(std::abs(energy(sys, up, mode).total - e0) < 1e-10 * std::abs(e0));
    }

    Rng rng2(9);
    const KernelOperator any = random_unitary(sys.grid, rng2, 2.0);
    const KernelOperator w = random_op(sys, 4);
    const KernelOperator k0 = density_matrices(w).k;
    const KernelOperator k1 = density_matrices(compose(w, any)).k;
    CHECK(hs_norm(k1 - k0) < 1e-12 * hs_norm(k0));
}

TEST_CASE("gradient structure") {
    const System sys = small_system();
    CHECK(hs_norm(gradient(sys, KernelOperator::zero(sys.grid), EnergyMode::full)) == 0.0);

    const System off = small_system(false);
    const KernelOperator w = random_op(off, 2);
    const KernelOperator g_off = gradient(off, w, EnergyMode::full);
    CHECK(hs_norm(g_off - anticommutator(off.h0, w)) == 0.0);

    for (auto mode : {EnergyMode::reduced, EnergyMode::full}) {
        const KernelOperator x = random_op(sys, 6);
        const bool ex = mode == EnergyMode::full;
        const KernelOperator hq = assemble_hamiltonian(sys, x, ex).hq;
        CHECK(hs_norm(gradient(sys, x, mode).adjoint() - anticommutator(hq, x.adjoint())) <
              1e-12 * hs_norm(gradient(sys, x, mode)));
        const KernelOperator herm = hermitian_part(x);
        CHECK(hermiticity_defect(gradient(sys, herm, mode)) < 1e-12);
    }
}

TEST_CASE("analytic gradient against finite differences") {
    SUBCASE("coupling off: quadratic energy") {
        const System off = small_system(false);
        const KernelOperator w = random_op(off, 1);
        const KernelOperator fd = gradient_fd_oracle(off, w, EnergyMode::reduced, 1e-4);
        const KernelOperator g = gradient(off, w, EnergyMode::reduced);
        CHECK((fd.values() - g.values()).cwiseAbs().maxCoeff() < 1e-9 * g.values().cwiseAbs().maxCoeff());
    }
    SUBCASE("reduced and full, full entry sweep") {
        const System sys = small_system();
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const KernelOperator w = random_op(sys, seed, 0.3);
            for (auto mode : {EnergyMode::reduced, EnergyMode::full}) {
                const auto samples = gradient_fd_check_entries(sys, w, mode, 1e-5, seed);
                CHECK(samples.size() == 256);
                CHECK(max_relative_deviation(gradient(sys, w, mode), samples) < 1e-6);
            }
        }
    }
    SUBCASE("sampled entries on a larger grid") {
        const System sys = small_system(true, 32);
        const KernelOperator w = random_op(sys, 4, 0.2);
        const auto samples = gradient_fd_check_entries(sys, w, EnergyMode::full, 1e-5, 4);
        CHECK(samples.size() == 200);
        CHECK(max_relative_deviation(gradient(sys, w, EnergyMode::full), samples) < 1e-6);
    }
    SUBCASE("directional derivative: dE/ds = Re<G, delta> / 2") {
        const System sys = small_system();
        const KernelOperator w = random_op(sys, 8, 0.3);
        const KernelOperator delta = random_op(sys, 9, 1.0);
        for (auto mode : {EnergyMode::reduced, EnergyMode::full}) {
            const double s = 1e-5;
            const double plus = energy(sys, w + s * Complex(1.0) * delta, mode).total;
            const double minus = energy(sys, w - s * Complex(1.0) * delta, mode).total;
            const double fd = (plus - minus) / (2 * s);
            const double analytic = 0.5 * hs_inner(gradient(sys, w, mode), delta).real();
            CHECK(fd == doctest::Approx(analytic).epsilon(1e-7));
        }
    }
    SUBCASE("step bounds") {
        const System sys = small_system();
        const KernelOperator w = random_op(sys, 1);
        CHECK_THROWS_AS(gradient_fd_oracle(sys, w, EnergyMode::reduced, 1e-8), std::invalid_argument);
        CHECK_THROWS_AS(gradient_fd_oracle(sys, w, EnergyMode::reduced, 1e-2), std::invalid_argument);
    }
}

TEST_CASE("energy difference without cancellation") {
    const System sys = small_system();
    const KernelOperator w = random_op(sys, 21, 0.3);
    for (auto mode : {EnergyMode::reduced, EnergyMode::full}) {
        SUBCASE("large increments match the plain difference") {
            const KernelOperator w2 = random_op(sys, 22, 0.3);
            const double plain = energy(sys, w2, mode).total - energy(sys, w, mode).total;
            CHECK(energy_difference(sys, w, w2, mode) == doctest::Approx(plain).epsilon(1e-12));
        }
        SUBCASE("tiny increments match the first-order term") {
            const KernelOperator delta = random_op(sys, 23, 1e-9);
            const double first_order = 0.5 * hs_inner(gradient(sys, w, mode), delta).real();
            CHECK(energy_difference(sys, w, w + delta, mode) == doctest::Approx(first_order).epsilon(1e-6));
        }
    }
}
