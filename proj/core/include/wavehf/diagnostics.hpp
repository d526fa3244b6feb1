#pragma once

#include <optional>
#include <span>
#include <vector>

#include "wavehf/energy.hpp"
#include "wavehf/kernel_operator.hpp"
#include "wavehf/lattice.hpp"
#include "wavehf/propagator.hpp"

namespace wavehf {

struct TrajectoryRecord {
    double t = 0.0;
    EnergyBreakdown energy;
    double charge = 0.0;  ///< e tr Ktilde
    double hs_norm = 0.0;
    double h1_norm = 0.0;
    double h2_norm = 0.0;
    double op_norm = 0.0;
    double k_min_eig = 0.0;  ///< spectral bounds of K = w w*
    double k_max_eig = 0.0;
    int picard_iters = 0;
    std::optional<double> vn_residual;
};

struct RecordContext {
    EnergyMode mode = EnergyMode::reduced;
    int picard_iters = 0;
    std::optional<double> vn_residual;
};

TrajectoryRecord record(const System& system, const KernelOperator& w, double t, const RecordContext& context);

/// || i (K_next - K_prev) / (2 dt) - [Htilde(w), K] ||_H0 with K = w w*.
double von_neumann_residual(const System& system, const KernelOperator& w_prev, const KernelOperator& w,
                            const KernelOperator& w_next, double dt, EnergyMode mode);

/// max_ij |Htilde(w)_ij - H(K = w)_ij|: wave-matrix against density-matrix operator.
double slater_agreement_defect(const System& system, const KernelOperator& w, bool exchange);

struct DriftSummary {
    double energy_drift = 0.0;   ///< max_t |E(t) - E(0)| / |E(0)|
    double charge_drift = 0.0;
    double opnorm_drift = 0.0;
    double hs_drift = 0.0;
    double h1_max = 0.0;
    double h2_max = 0.0;
    double gronwall_rate = 0.0;  ///< kappa fitted to log h2 over the first quarter of the run
    double gronwall_ratio = 0.0; ///< max_t h2(t) / exp(kappa t)
    double k_min_eig = 0.0;      ///< extremes over the run
    double k_max_eig = 0.0;
};

/// Needs at least two records; throws std::invalid_argument otherwise.
DriftSummary conservation_drift(std::span<const TrajectoryRecord> records);

/// Step observer that turns a trajectory into records every `stride` steps.
/// A record is completed one step late so that it can carry the central-difference
/// von Neumann residual; the last record has none.
class TrajectoryRecorder {
public:
    TrajectoryRecorder(const System& system, EnergyMode mode, double dt, long stride, bool with_vn_residual = true);

    void observe(const KernelOperator& w, double t, const StepInfo& info);
    /// Flushes the pending record. Idempotent.
    void finish();

    const std::vector<TrajectoryRecord>& records() const noexcept { return records_; }
    StepObserver observer();

private:
    struct Observed {
        KernelOperator state;
        double t;
        int picard_iters;
        long step;
    };

    const System& system_;
    EnergyMode mode_;
    double dt_;
    long stride_;
    bool with_vn_;
    std::optional<Observed> last_;
    std::optional<Observed> pending_;
    std::optional<KernelOperator> pending_prev_;
    long last_recorded_ = -1;
    std::vector<TrajectoryRecord> records_;
};

}  // namespace wavehf
