#pragma once

#include "vfbd/model/simulation.hpp"
#include "vfbd/mor/bilinear.hpp"

namespace vfbd::mor {

struct RomErrorReport {
    double relative_mse = 0.0;       ///< sum ||x - V x_r||^2 / sum ||x||^2 over the trajectory
    double max_abs_error = 0.0;      ///< max pointwise moisture error (kg/kg)
    double output_max_error = 0.0;   ///< max outlet error
    double fom_step_mean = 0.0;      ///< seconds
    double fom_step_std = 0.0;
    double rom_step_mean = 0.0;
    double rom_step_std = 0.0;
    double speedup = 0.0;            ///< fom_step_mean / rom_step_mean
    std::size_t steps = 0;
};

/// Error of a lifted reduced trajectory against the full one (same time grid).
RomErrorReport compare_trajectories(const model::Trajectory& fom, const model::Trajectory& rom,
                                    const RomBasis& basis);

/// Simulates FOM and ROM from the steady state at the first log row and compares them.
RomErrorReport rom_error_report(const BilinearSystem& fom, const RomSystem& rom, const RomBasis& basis,
                                const model::DryerModel& model, const model::SignalLog& log,
                                const model::SimulationOptions& options = {});

} // namespace vfbd::mor
