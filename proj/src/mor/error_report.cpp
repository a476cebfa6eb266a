#include "vfbd/mor/error_report.hpp"

#include <algorithm>
#include <cmath>

#include "vfbd/errors.hpp"
#include "vfbd/stats.hpp"

namespace vfbd::mor {

RomErrorReport compare_trajectories(const model::Trajectory& fom, const model::Trajectory& rom,
                                    const RomBasis& basis)
{
    if (fom.states.size() != rom.states.size()) {
        throw DimensionError("compare_trajectories: trajectories have different lengths");
    }
    RomErrorReport r;
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t k = 0; k < fom.states.size(); ++k) {
        const Eigen::VectorXd e = fom.states[k].x - basis.lift(rom.states[k].x);
        err += e.squaredNorm();
        ref += fom.states[k].x.squaredNorm();
        r.max_abs_error = std::max(r.max_abs_error, e.cwiseAbs().maxCoeff());
        r.output_max_error = std::max(r.output_max_error, std::abs(fom.y[k] - rom.y[k]));
    }
    r.relative_mse = ref > 0.0 ? err / ref : err;
    const MeanStd f = mean_std(fom.step_seconds);
    const MeanStd q = mean_std(rom.step_seconds);
    r.fom_step_mean = f.mean;
    r.fom_step_std = f.std;
    r.rom_step_mean = q.mean;
    r.rom_step_std = q.std;
    r.speedup = q.mean > 0.0 ? f.mean / q.mean : 0.0;
    r.steps = fom.step_seconds.size();
    return r;
}

RomErrorReport rom_error_report(const BilinearSystem& fom, const RomSystem& rom, const RomBasis& basis,
                                const model::DryerModel& model, const model::SignalLog& log,
                                const model::SimulationOptions& options)
{
    if (log.empty()) {
        throw std::invalid_argument("rom_error_report: empty signal log");
    }
    const model::FomState s0 = model::steady_state(model, log.samples[0].u, log.samples[0].w);
    const model::ModelState full{s0.x1, s0.m_h, s0.eps, s0.T_s};
    const model::ModelState reduced{basis.project(s0.x1), s0.m_h, s0.eps, s0.T_s};
    const model::Trajectory tf = model::simulate(fom, model, log, full, options);
    const model::Trajectory tr = model::simulate(rom, model, log, reduced, options);
    return compare_trajectories(tf, tr, basis);
}

} // namespace vfbd::mor
