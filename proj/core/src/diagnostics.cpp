#include "wavehf/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wavehf/meanfield.hpp"
#include "wavehf/norms.hpp"

namespace wavehf {

TrajectoryRecord record(const System& system, const KernelOperator& w, double t, const RecordContext& context) {
    const DensityMatrices dm = density_matrices(w);
    const SobolevNorms sn = sobolev_norms(w);
    const SpectralBounds kb = spectral_bounds(dm.k);

    TrajectoryRecord r;
    r.t = t;
    r.energy = density_matrix_energy(system, dm.ktilde, context.mode);
    r.charge = kElectronCharge * trace(dm.ktilde).real();
    r.hs_norm = sn.h0;
    r.h1_norm = sn.h1;
    r.h2_norm = sn.h2;
    r.op_norm = operator_norm(w);
    r.k_min_eig = kb.min_eig;
    r.k_max_eig = kb.max_eig;
    r.picard_iters = context.picard_iters;
    r.vn_residual = context.vn_residual;
    return r;
}

double von_neumann_residual(const System& system, const KernelOperator& w_prev, const KernelOperator& w,
                            const KernelOperator& w_next, double dt, EnergyMode mode) {
    const KernelOperator k_prev = compose(w_prev, w_prev.adjoint());
    const KernelOperator k_next = compose(w_next, w_next.adjoint());
    const KernelOperator k = compose(w, w.adjoint());
    const MeanField mf = assemble_hamiltonian(system, w, mode == EnergyMode::full);
    const KernelOperator lhs = Complex(0.0, 1.0 / (2.0 * dt)) * (k_next - k_prev);
    return hs_norm(lhs - commutator(mf.hq, k));
}

double slater_agreement_defect(const System& system, const KernelOperator& w, bool exchange) {
    const MeanField mf = assemble_hamiltonian(system, w, exchange);
    const KernelOperator h = density_matrix_hamiltonian(system, w, exchange);
    return (mf.hq.values() - h.values()).cwiseAbs().maxCoeff();
}

namespace {

template <typename Get>
double relative_drift(std::span<const TrajectoryRecord> records, Get get) {
    const double ref = get(records.front());
    double worst = 0.0;
    for (const auto& r : records) {
        worst = std::max(worst, std::abs(get(r) - ref));
    }
    return ref != 0.0 ? worst / std::abs(ref) : worst;
}

}  // namespace

DriftSummary conservation_drift(std::span<const TrajectoryRecord> records) {
    if (records.size() < 2) {
        throw std::invalid_argument("drift summary needs at least two records");
    }
    DriftSummary s;
    s.energy_drift = relative_drift(records, [](const auto& r) { return r.energy.total; });
    s.charge_drift = relative_drift(records, [](const auto& r) { return r.charge; });
    s.opnorm_drift = relative_drift(records, [](const auto& r) { return r.op_norm; });
    s.hs_drift = relative_drift(records, [](const auto& r) { return r.hs_norm; });
    s.k_min_eig = records.front().k_min_eig;
    s.k_max_eig = records.front().k_max_eig;
    for (const auto& r : records) {
        s.h1_max = std::max(s.h1_max, r.h1_norm);
        s.h2_max = std::max(s.h2_max, r.h2_norm);
        s.k_min_eig = std::min(s.k_min_eig, r.k_min_eig);
        s.k_max_eig = std::max(s.k_max_eig, r.k_max_eig);
    }

    // least-squares slope of log h2 against t over the first quarter
    const double t0 = records.front().t;
    const double cutoff = t0 + 0.25 * (records.back().t - t0);
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    int count = 0;
    for (const auto& r : records) {
        if (r.t > cutoff || !(r.h2_norm > 0.0)) {
            continue;
        }
        const double y = std::log(r.h2_norm);
        st += r.t;
        sy += y;
        stt += r.t * r.t;
        sty += r.t * y;
        ++count;
    }
    const double denom = count * stt - st * st;
    s.gronwall_rate = (count >= 2 && denom > 0.0) ? (count * sty - st * sy) / denom : 0.0;
    for (const auto& r : records) {
        s.gronwall_ratio = std::max(s.gronwall_ratio, r.h2_norm / std::exp(s.gronwall_rate * r.t));
    }
    return s;
}

TrajectoryRecorder::TrajectoryRecorder(const System& system, EnergyMode mode, double dt, long stride,
                                       bool with_vn_residual)
    : system_(system), mode_(mode), dt_(dt), stride_(stride), with_vn_(with_vn_residual) {
    if (stride < 1) {
        throw std::invalid_argument("record stride must be at least 1");
    }
}

void TrajectoryRecorder::observe(const KernelOperator& w, double t, const StepInfo& info) {
    if (pending_) {
        const double vn = von_neumann_residual(system_, *pending_prev_, pending_->state, w, dt_, mode_);
        records_.push_back(record(system_, pending_->state, pending_->t, {mode_, pending_->picard_iters, vn}));
        last_recorded_ = pending_->step;
        pending_.reset();
        pending_prev_.reset();
    }
    Observed current{w, t, info.picard_iterations, info.step};
    if (info.step % stride_ == 0) {
        if (with_vn_ && last_) {
            pending_ = current;
            pending_prev_ = last_->state;
        } else {
            records_.push_back(record(system_, w, t, {mode_, info.picard_iterations, std::nullopt}));
            last_recorded_ = info.step;
        }
    }
    last_ = std::move(current);
}

void TrajectoryRecorder::finish() {
    if (pending_) {
        records_.push_back(record(system_, pending_->state, pending_->t, {mode_, pending_->picard_iters, std::nullopt}));
        last_recorded_ = pending_->step;
        pending_.reset();
        pending_prev_.reset();
    }
    if (last_ && last_->step != last_recorded_) {
        records_.push_back(record(system_, last_->state, last_->t, {mode_, last_->picard_iters, std::nullopt}));
        last_recorded_ = last_->step;
    }
}

StepObserver TrajectoryRecorder::observer() {
    return [this](const KernelOperator& w, double t, const StepInfo& info) { observe(w, t, info); };
}

}  // namespace wavehf
