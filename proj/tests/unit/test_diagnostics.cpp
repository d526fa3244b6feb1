#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "wavehf/diagnostics.hpp"
#include "wavehf/norms.hpp"
#include "wavehf/random.hpp"

using namespace wavehf;

namespace {

System test_system(bool coupling = true) {
    return make_system(Grid::build(1, 32, 6.0), {Nucleus{{0.0, 0.0, 0.0}, 2}}, 0.5, coupling);
}

Eigen::MatrixXcd orbitals(const System& sys) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(sys.h0.action());
    return solver.eigenvectors();
}

KernelOperator slater(const System& sys, int N) {
    const Eigen::MatrixXcd v = orbitals(sys).leftCols(N);
    return KernelOperator::from_action(sys.grid, v * v.adjoint());
}

KernelOperator perturbed(const System& sys, std::uint64_t seed) {
    Rng rng(seed);
    return slater(sys, 2) + random_hermitian(sys.grid, rng, 0.1);
}

StepperConfig config(double dt) {
    StepperConfig c;
    c.dt = dt;
    return c;
}

}  // namespace

TEST_CASE("record of zero") {
    const System sys = test_system();
    const TrajectoryRecord r = record(sys, KernelOperator::zero(sys.grid), 0.0, {});
    CHECK(r.energy.total == 0.0);
    CHECK(r.charge == 0.0);
    CHECK(r.hs_norm == 0.0);
    CHECK(r.h1_norm == 0.0);
    CHECK(r.h2_norm == 0.0);
    CHECK(r.op_norm == 0.0);
    CHECK(r.k_min_eig == 0.0);
    CHECK(r.k_max_eig == 0.0);
    CHECK_FALSE(r.vn_residual.has_value());
}

TEST_CASE("record of Slater data at t = 0") {
    const System sys = test_system();
    for (int N : {1, 2, 3}) {
        const TrajectoryRecord r = record(sys, slater(sys, N), 0.0, {});
        CHECK(r.charge == doctest::Approx(kElectronCharge * N).epsilon(1e-12));
        CHECK(r.op_norm == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.k_max_eig == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(r.k_min_eig) < 1e-12);
        CHECK(r.hs_norm * r.hs_norm == doctest::Approx(N).epsilon(1e-12));
    }
}

TEST_CASE("record invariants on random data") {
    const System sys = test_system();
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const KernelOperator w(sys.grid, 0.1 * oracle::random_matrix(sys.grid->size(), seed));
        const TrajectoryRecord r = record(sys, w, 0.5, {EnergyMode::full, 3, 0.25});
        CHECK(r.charge == doctest::Approx(kElectronCharge * r.hs_norm * r.hs_norm).epsilon(1e-12));
        CHECK(r.k_min_eig >= -1e-10 * std::max(1.0, r.k_max_eig));
        CHECK(r.hs_norm <= r.h1_norm);
        CHECK(r.h1_norm <= r.h2_norm);
        CHECK(r.picard_iters == 3);
        CHECK(r.vn_residual.value() == 0.25);
        CHECK(r.t == 0.5);
        CHECK(r.energy.total == doctest::Approx(energy(sys, w, EnergyMode::full).total).epsilon(1e-14));
    }
}

TEST_CASE("von Neumann residual") {
    SUBCASE("zero state") {
        const System sys = test_system();
        const KernelOperator z = KernelOperator::zero(sys.grid);
        CHECK(von_neumann_residual(sys, z, z, z, 1e-3, EnergyMode::reduced) == 0.0);
    }
    SUBCASE("free flow of an eigenbasis superposition: second order") {
        const System off = test_system(false);
        const FreePropagator free(off);
        const Eigen::MatrixXcd v = orbitals(off) / std::sqrt(off.grid->cell_volume());
        const Eigen::MatrixXcd w_values = v.col(0) * v.col(0).adjoint() + 0.5 * v.col(1) * v.col(2).adjoint() +
                                          Complex(0.0, 0.3) * v.col(3) * v.col(0).adjoint();
        const KernelOperator w(off.grid, w_values);
        std::vector<double> dts{4e-3, 2e-3, 1e-3};
        std::vector<double> res;
        for (double dt : dts) {
            res.push_back(von_neumann_residual(off, free.free_evolve(w, -dt), w, free.free_evolve(w, dt), dt,
                                               EnergyMode::reduced));
        }
        CHECK(res[0] > 0.0);
        CHECK(oracle::loglog_slope(dts, res) == doctest::Approx(2.0).epsilon(0.05));
    }
    SUBCASE("reduced dynamics: second order") {
        const System sys = test_system();
        const FreePropagator free(sys);
        const KernelOperator w0 = perturbed(sys, 4);
        std::vector<double> dts{2e-3, 1e-3, 5e-4};
        std::vector<double> res;
        for (double dt : dts) {
            const KernelOperator w = evolve(sys, free, w0, 10 * dt, config(dt)).final_state;
            const Stepper fwd(sys, free, config(dt));
            const Stepper bwd(sys, free, config(-dt));
            const KernelOperator next = fwd.step(w, 10 * dt).state;
            const KernelOperator prev = bwd.step(w, 10 * dt).state;
            res.push_back(von_neumann_residual(sys, prev, w, next, dt, EnergyMode::reduced));
        }
        CHECK(oracle::loglog_slope(dts, res) == doctest::Approx(2.0).epsilon(0.1));
    }
}

TEST_CASE("Slater agreement") {
    const System sys = test_system();
    for (bool exchange : {false, true}) {
        CHECK(slater_agreement_defect(sys, slater(sys, 2), exchange) < 1e-12);
    }
    // a non-projector generally breaks the agreement
    CHECK(slater_agreement_defect(sys, perturbed(sys, 2), false) > 1e-6);
}

TEST_CASE("trajectory recorder") {
    const System sys = test_system();
    const FreePropagator free(sys);
    const KernelOperator w0 = perturbed(sys, 5);

    TrajectoryRecorder rec(sys, EnergyMode::reduced, 1e-3, 5);
    evolve(sys, free, w0, 0.012, config(1e-3), rec.observer());
    rec.finish();
    rec.finish();  // idempotent
    const auto& records = rec.records();
    REQUIRE(records.size() == 4);
    CHECK(records[0].t == 0.0);
    CHECK(records[1].t == doctest::Approx(0.005));
    CHECK(records[2].t == doctest::Approx(0.010));
    CHECK(records[3].t == doctest::Approx(0.012));
    CHECK_FALSE(records[0].vn_residual.has_value());
    CHECK(records[1].vn_residual.has_value());
    CHECK(records[2].vn_residual.has_value());
    CHECK_FALSE(records[3].vn_residual.has_value());
    CHECK(records[1].picard_iters >= 1);
    CHECK(*records[1].vn_residual < 1e-3);

    SUBCASE("without residuals every record is immediate") {
        TrajectoryRecorder plain(sys, EnergyMode::reduced, 1e-3, 5, false);
        evolve(sys, free, w0, 0.010, config(1e-3), plain.observer());
        plain.finish();
        CHECK(plain.records().size() == 3);
        for (const auto& r : plain.records()) {
            CHECK_FALSE(r.vn_residual.has_value());
        }
    }
    CHECK_THROWS_AS(TrajectoryRecorder(sys, EnergyMode::reduced, 1e-3, 0), std::invalid_argument);
}

TEST_CASE("conservation drift") {
    SUBCASE("free evolution conserves everything") {
        const System off = test_system(false);
        const FreePropagator free(off);
        TrajectoryRecorder rec(off, EnergyMode::reduced, 1e-3, 10);
        evolve(off, free, perturbed(off, 6), 0.2, config(1e-3), rec.observer());
        rec.finish();
        const DriftSummary s = conservation_drift(rec.records());
        CHECK(s.energy_drift < 1e-12);
        CHECK(s.charge_drift < 1e-12);
        CHECK(s.hs_drift < 1e-12);
        CHECK(s.opnorm_drift < 1e-11);  // SVD roundoff
        CHECK(std::isfinite(s.h1_max));
        CHECK(s.h2_max >= s.h1_max);
        CHECK(std::isfinite(s.gronwall_ratio));
    }
    SUBCASE("hand-made records") {
        std::vector<TrajectoryRecord> rs(3);
        for (int k = 0; k < 3; ++k) {
            rs[k].t = k;
            rs[k].energy.total = -2.0 + 0.01 * k;
            rs[k].charge = -2.0;
            rs[k].op_norm = 1.0;
            rs[k].hs_norm = std::sqrt(2.0);
            rs[k].h1_norm = 3.0 + k;
            rs[k].h2_norm = std::exp(0.5 * k);
            rs[k].k_min_eig = -1e-12 * k;
            rs[k].k_max_eig = 1.0;
        }
        const DriftSummary s = conservation_drift(rs);
        CHECK(s.energy_drift == doctest::Approx(0.01));
        CHECK(s.charge_drift == 0.0);
        CHECK(s.h1_max == 5.0);
        CHECK(s.k_min_eig == doctest::Approx(-2e-12));
        CHECK(s.gronwall_ratio >= 1.0);
        CHECK_THROWS_AS(conservation_drift(std::span(rs).first(1)), std::invalid_argument);
    }
}
