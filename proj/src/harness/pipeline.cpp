#include "vfbd/harness/pipeline.hpp"

#include "vfbd/harness/signal_io.hpp"
#include "vfbd/mor/rom_file.hpp"

namespace vfbd::harness {

model::GprSet build_gpr(const AppConfig& cfg)
{
    const model::GprTrainingSet data = cfg.gpr_training.empty()
                                           ? model::synthetic_gpr_training(cfg.gpr_points_per_axis)
                                           : model::load_gpr_training(cfg.gpr_training);
    return model::fit_gpr_set(data);
}

model::DryerModel build_model(const AppConfig& cfg, int n)
{
    return model::DryerModel(model::make_grid(n, cfg.length), cfg.params, build_gpr(cfg));
}

PreparedRom prepare_rom(const AppConfig& cfg, const model::DryerModel& model, const mor::BilinearSystem& fom)
{
    if (!cfg.rom_file.empty()) {
        mor::RomFile f = mor::load_rom(cfg.rom_file);
        if (f.basis.full_order() != fom.order()) {
            throw ConfigError("ROM file " + cfg.rom_file + " was reduced from a grid of " +
                              std::to_string(f.basis.full_order()) + " points, model has " +
                              std::to_string(fom.order()));
        }
        return {std::move(f.rom), std::move(f.basis), std::nullopt};
    }
    mor::ReductionSettings rs = cfg.reduce;
    if (cfg.fit_window) {
        fit_reduction_window(rs, model, cfg.scenario);
    }
    mor::ReductionResult red = mor::reduce_h2(fom, rs);
    PreparedRom out{red.rom, red.basis, std::nullopt};
    out.reduction = std::move(red);
    return out;
}

SyntheticRun prepare_signals(const AppConfig& cfg, const model::DryerModel& model, const mor::BilinearSystem& fom)
{
    if (!cfg.signal_log.empty()) {
        SyntheticRun run;
        run.log = load_signal_log(cfg.signal_log, cfg.scenario.dt);
        return run;
    }
    const InputEnvelope env = InputEnvelope::from_gpr(model.gpr());
    return attach_measurements(synthesize_signals(cfg.scenario, env), fom, model, cfg.noise_std, cfg.noise_seed,
                               cfg.observer.prediction);
}

} // namespace vfbd::harness
