#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "wavehf/kernel_operator.hpp"
#include "wavehf/lattice.hpp"

namespace wavehf {

/// U0(t) = exp(-i H0 t) from one eigendecomposition of H0.
class FreePropagator {
public:
    explicit FreePropagator(const System& system);

    /// Kernel of U0(t).
    KernelOperator evolution(double t) const;

    /// U0(t) o w o U0(t): both sides, as dictated by the anticommutator generator.
    KernelOperator free_evolve(const KernelOperator& w, double t) const;

    /// C = U0(-t) o w o U0(-t), the inverse of free_evolve.
    KernelOperator interaction_picture(const KernelOperator& w, double t) const;

    const RealVector& eigenvalues() const noexcept { return eigenvalues_; }
    const Eigen::MatrixXd& eigenvectors() const noexcept { return eigenvectors_; }
    const std::shared_ptr<const Grid>& grid_ptr() const noexcept { return grid_; }

private:
    std::shared_ptr<const Grid> grid_;
    RealVector eigenvalues_;        // of the action matrix h^d H0
    Eigen::MatrixXd eigenvectors_;  // orthonormal columns
};

enum class Scheme { duhamel, rk4 };

struct StepperConfig {
    double dt = 1e-3;
    double picard_tol = 1e-12;  ///< on the H0 norm of successive Picard iterates
    int picard_max_iter = 50;
    Scheme scheme = Scheme::duhamel;
    bool exchange = false;

    /// Throws std::invalid_argument for a zero or non-finite dt, a nonpositive tolerance
    /// or iteration cap. Negative dt is allowed for backward steps.
    void validate() const;
};

struct StepResult {
    KernelOperator state;
    KernelOperator midpoint;          ///< estimate of w(t + dt/2)
    int picard_iterations = 0;        ///< 0 for rk4
    std::vector<double> increments;   ///< Picard H0 increments, in order
};

/// Stepper with the free factors U0(dt/2) cached for its fixed dt.
///
/// Duhamel step. With B = U0(dt/2) and c0 = B w B, the Picard iteration
///   m  <- (c0 + c1) / 2
///   c1 <- c0 - i dt {Vtilde(m), m}
/// runs until ||c1_new - c1||_H0 < picard_tol, and returns w' = B c1 B.
/// The midpoint m = (B w B + B* w' B*) / 2 is the average of the two free
/// half-step propagations toward t + dt/2. The step is second order, symmetric
/// under dt -> -dt, and reduces to w' = U0(dt) w U0(dt) when Vtilde = 0.
class Stepper {
public:
    Stepper(const System& system, const FreePropagator& free, StepperConfig config);

    /// Throws NumericalError on Picard non-convergence or a non-finite state.
    StepResult step(const KernelOperator& w, double t) const;

    StepResult duhamel(const KernelOperator& w, double t) const;
    StepResult rk4(const KernelOperator& w, double t) const;

    const StepperConfig& config() const noexcept { return config_; }

private:
    const System& system_;
    const FreePropagator& free_;
    StepperConfig config_;
    KernelOperator half_;  // U0(dt/2)
};

StepResult duhamel_step(const System& system, const FreePropagator& free, const KernelOperator& w, double t,
                        const StepperConfig& config);
StepResult rk4_step(const System& system, const FreePropagator& free, const KernelOperator& w, double t,
                    const StepperConfig& config);

/// Passed to observers after every step (and once for the initial state).
struct StepInfo {
    long step = 0;
    int picard_iterations = 0;
    const KernelOperator* midpoint = nullptr;  ///< null for the initial call
};

using StepObserver = std::function<void(const KernelOperator& w, double t, const StepInfo& info)>;

struct EvolveResult {
    KernelOperator final_state;
    double final_time = 0.0;
    long steps = 0;
};

/// Integrates from t = 0 to T with fixed dt; T must be an integer multiple of dt
/// (to 1e-9 relative). The observer sees the initial state and then every
/// `stride`-th step plus the final one. Non-finite states abort with NumericalError.
/// With coupling off and the Duhamel scheme each state is U0(t) w0 U0(t) computed directly.
EvolveResult evolve(const System& system, const FreePropagator& free, const KernelOperator& w0, double T,
                    const StepperConfig& config, const StepObserver& observer = {}, long stride = 1);

/// U_L, U_R of the interaction picture: i dU_L/dt = V_L U_L, i dU_R/dt = U_R V_R with
/// V_L(t) = U0(-t) Vtilde U0(t) and V_R(t) = U0(t) Vtilde U0(-t).
struct AuxPropagators {
    KernelOperator left;
    KernelOperator right;

    static AuxPropagators identity(std::shared_ptr<const Grid> grid);
};

/// Exponential midpoint update over [t, t+dt] with the generators frozen at the
/// midpoint state: U_L <- exp(-i dt V_L(t+dt/2)) U_L, U_R <- U_R exp(-i dt V_R(t+dt/2)).
AuxPropagators aux_propagators_step(const AuxPropagators& aux, double t, const KernelOperator& w_mid,
                                    double dt, const System& system, const FreePropagator& free,
                                    bool exchange);

/// U0(t) U_L w0 U_R U0(t).
KernelOperator represent(const FreePropagator& free, const AuxPropagators& aux, const KernelOperator& w0,
                         double t);

}  // namespace wavehf
