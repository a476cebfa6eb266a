#pragma once

#include <optional>

#include "vfbd/harness/config.hpp"
#include "vfbd/mor/bilinear.hpp"
#include "vfbd/mor/reduce.hpp"

namespace vfbd::harness {

model::GprSet build_gpr(const AppConfig& cfg);

model::DryerModel build_model(const AppConfig& cfg, int n);

struct PreparedRom {
    mor::RomSystem rom;
    mor::RomBasis basis;
    std::optional<mor::ReductionResult> reduction;   ///< empty when loaded from a file
};

/// Loads io.rom when set (checking its order against the model), else reduces.
PreparedRom prepare_rom(const AppConfig& cfg, const model::DryerModel& model, const mor::BilinearSystem& fom);

/// io.signal_log when set, else the synthetic scenario with measurements from the full model.
SyntheticRun prepare_signals(const AppConfig& cfg, const model::DryerModel& model, const mor::BilinearSystem& fom);

} // namespace vfbd::harness
