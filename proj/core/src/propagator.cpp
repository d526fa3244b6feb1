#include "wavehf/propagator.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <Eigen/Eigenvalues>

#include "wavehf/error.hpp"
#include "wavehf/meanfield.hpp"
#include "wavehf/norms.hpp"

namespace wavehf {

FreePropagator::FreePropagator(const System& system) : grid_(system.grid) {
    const Eigen::MatrixXd action = system.h0.action().real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (action + action.transpose()));
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition of H0 failed");
    }
    eigenvalues_ = solver.eigenvalues();
    eigenvectors_ = solver.eigenvectors();
}

KernelOperator FreePropagator::evolution(double t) const {
    const Eigen::VectorXcd phases = (eigenvalues_.cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
    const ComplexMatrix vecs = eigenvectors_.cast<Complex>();
    const ComplexMatrix u = vecs * phases.asDiagonal() * vecs.transpose();
    return KernelOperator::from_action(grid_, u);
}

KernelOperator FreePropagator::free_evolve(const KernelOperator& w, double t) const {
    const KernelOperator u = evolution(t);
    return compose(u, w, u);
}

KernelOperator FreePropagator::interaction_picture(const KernelOperator& w, double t) const {
    return free_evolve(w, -t);
}

void StepperConfig::validate() const {
    if (!(dt != 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("time step must be nonzero and finite");
    }
    if (!(picard_tol > 0.0)) {
        throw std::invalid_argument("Picard tolerance must be positive");
    }
    if (picard_max_iter < 1) {
        throw std::invalid_argument("Picard iteration cap must be at least 1");
    }
}

Stepper::Stepper(const System& system, const FreePropagator& free, StepperConfig config)
    : system_(system), free_(free), config_(config), half_(free.evolution(0.5 * config.dt)) {
    config_.validate();
}

StepResult Stepper::step(const KernelOperator& w, double t) const {
    return config_.scheme == Scheme::duhamel ? duhamel(w, t) : rk4(w, t);
}

namespace {

void require_finite(const KernelOperator& w, double t) {
    if (!w.is_finite()) {
        std::ostringstream msg;
        msg << "non-finite wave matrix at t=" << t;
        throw NumericalError(msg.str(), t);
    }
}

}  // namespace

StepResult Stepper::duhamel(const KernelOperator& w, double t) const {
    const double dt = config_.dt;
    const Complex minus_i_dt(0.0, -dt);
    const KernelOperator c0 = compose(half_, w, half_);

    KernelOperator c1 = c0;
    KernelOperator mid = c0;
    std::vector<double> increments;
    bool converged = false;
    for (int k = 0; k < config_.picard_max_iter; ++k) {
        KernelOperator next = c0 + minus_i_dt * interaction_anticommutator(system_, mid, config_.exchange);
        const double inc = hs_norm(next - c1);
        increments.push_back(inc);
        c1 = std::move(next);
        mid = 0.5 * (c0 + c1);
        if (!std::isfinite(inc)) {
            break;
        }
        if (inc < config_.picard_tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "Picard iteration did not converge at t=" << t << " after " << increments.size()
            << " iterations (last increment " << increments.back() << "); reduce dt";
        throw NumericalError(msg.str(), t);
    }

    KernelOperator state = compose(half_, c1, half_);
    require_finite(state, t + dt);
    const int iters = static_cast<int>(increments.size());
    return StepResult{std::move(state), std::move(mid), iters, std::move(increments)};
}

StepResult Stepper::rk4(const KernelOperator& w, double t) const {
    const double dt = config_.dt;
    const auto rhs = [&](const KernelOperator& x) {
        KernelOperator g = anticommutator(system_.h0, x);
        g += interaction_anticommutator(system_, x, config_.exchange);
        return Complex(0.0, -1.0) * std::move(g);
    };
    const KernelOperator k1 = rhs(w);
    const KernelOperator k2 = rhs(w + (0.5 * dt) * k1);
    const KernelOperator k3 = rhs(w + (0.5 * dt) * k2);
    const KernelOperator k4 = rhs(w + dt * k3);
    KernelOperator state = w + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    require_finite(state, t + dt);
    KernelOperator mid = 0.5 * (w + state);
    return StepResult{std::move(state), std::move(mid), 0, {}};
}

StepResult duhamel_step(const System& system, const FreePropagator& free, const KernelOperator& w, double t,
                        const StepperConfig& config) {
    StepperConfig cfg = config;
    cfg.scheme = Scheme::duhamel;
    return Stepper(system, free, cfg).step(w, t);
}

StepResult rk4_step(const System& system, const FreePropagator& free, const KernelOperator& w, double t,
                    const StepperConfig& config) {
    StepperConfig cfg = config;
    cfg.scheme = Scheme::rk4;
    return Stepper(system, free, cfg).step(w, t);
}

EvolveResult evolve(const System& system, const FreePropagator& free, const KernelOperator& w0, double T,
                    const StepperConfig& config, const StepObserver& observer, long stride) {
    config.validate();
    if (!(config.dt > 0.0)) {
        throw std::invalid_argument("evolve needs a positive time step");
    }
    if (!(T >= 0.0) || !std::isfinite(T)) {
        throw std::invalid_argument("final time must be nonnegative and finite");
    }
    if (stride < 1) {
        throw std::invalid_argument("observer stride must be at least 1");
    }
    const long steps = std::lround(T / config.dt);
    if (std::abs(static_cast<double>(steps) * config.dt - T) > 1e-9 * std::max(T, config.dt)) {
        throw std::invalid_argument("final time must be an integer multiple of dt");
    }
    require_finite(w0, 0.0);

    if (observer) {
        observer(w0, 0.0, StepInfo{0, 0, nullptr});
    }
    const Stepper stepper(system, free, config);
    // Without coupling the Duhamel step is the exact free flow, so take it from w0
    // directly instead of accumulating roundoff over many compositions.
    const bool exact_free = !system.coupling && config.scheme == Scheme::duhamel;
    KernelOperator w = w0;
    for (long k = 1; k <= steps; ++k) {
        const double t = static_cast<double>(k - 1) * config.dt;
        StepResult r = exact_free ? StepResult{free.free_evolve(w0, static_cast<double>(k) * config.dt),
                                               free.free_evolve(w0, t + 0.5 * config.dt), 1, {0.0}}
                                  : stepper.step(w, t);
        w = std::move(r.state);
        if (observer && (k % stride == 0 || k == steps)) {
            observer(w, static_cast<double>(k) * config.dt, StepInfo{k, r.picard_iterations, &r.midpoint});
        }
    }
    return EvolveResult{std::move(w), static_cast<double>(steps) * config.dt, steps};
}

AuxPropagators AuxPropagators::identity(std::shared_ptr<const Grid> grid) {
    auto id = KernelOperator::identity(std::move(grid));
    return AuxPropagators{id, id};
}

AuxPropagators aux_propagators_step(const AuxPropagators& aux, double t, const KernelOperator& w_mid,
                                    double dt, const System& system, const FreePropagator& free,
                                    bool exchange) {
    if (!system.coupling) {
        return aux;
    }
    const KernelOperator v = interaction_operator(system, w_mid, exchange);
    KernelOperator expv = KernelOperator::zero(system.grid);
    if (!exchange) {
        // multiplication operator: the action matrix is diagonal
        const Eigen::VectorXcd diag =
            (v.action().diagonal().real().cast<Complex>() * Complex(0.0, -dt)).array().exp().matrix();
        expv = KernelOperator::from_action(system.grid, diag.asDiagonal().toDenseMatrix());
    } else {
        expv = unitary_exp(v, dt);
    }
    const double tm = t + 0.5 * dt;
    const KernelOperator fwd = free.evolution(tm);
    const KernelOperator bwd = free.evolution(-tm);
    return AuxPropagators{compose(compose(bwd, expv, fwd), aux.left), compose(aux.right, compose(fwd, expv, bwd))};
}

KernelOperator represent(const FreePropagator& free, const AuxPropagators& aux, const KernelOperator& w0,
                         double t) {
    const KernelOperator u = free.evolution(t);
    return compose(compose(u, aux.left, w0), aux.right, u);
}

}  // namespace wavehf
