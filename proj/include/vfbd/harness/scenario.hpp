#pragma once

#include <cstdint>
#include <string>

#include "vfbd/model/bilinear_part.hpp"
#include "vfbd/model/dryer_model.hpp"
#include "vfbd/model/signal_log.hpp"
#include "vfbd/model/simulation.hpp"
#include "vfbd/mor/reduce.hpp"

namespace vfbd::harness {

enum class ScenarioShape { Constant, Staircase, Ramp };

ScenarioShape parse_shape(const std::string& name);
std::string shape_name(ScenarioShape s);

/// Seeded input generator. Every channel moves uniformly within nominal +- amplitude;
/// levels are redrawn every level_duration seconds.
struct ScenarioSpec {
    ScenarioShape shape = ScenarioShape::Staircase;
    double duration = 1800.0;
    double dt = 2.0;
    double level_duration = 120.0;
    std::uint64_t seed = 1;
    model::PlantInputs nominal_u;
    model::Disturbances nominal_w;
    model::PlantInputs amplitude_u{4.0, 0.004, 0.2, 10.0};
    model::Disturbances amplitude_w{3e-4, 1e-4, 0.02};
};

/// Region of (mdot_a, a_vib) covered by the coefficient maps.
struct InputEnvelope {
    double mdot_a_min = 0.03;
    double mdot_a_max = 0.05;
    double a_vib_min = 0.6;
    double a_vib_max = 1.4;

    static InputEnvelope from_gpr(const model::GprSet& gpr);
};

/// ConfigError for malformed specs, EnvelopeError when the ranges leave the envelope.
class EnvelopeError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

void validate_scenario(const ScenarioSpec& spec, const InputEnvelope& env);

/// Inputs only (y = 0). Row 0 holds the nominal operating point.
model::SignalLog synthesize_signals(const ScenarioSpec& spec, const InputEnvelope& env);

struct SyntheticRun {
    model::SignalLog log;
    model::Trajectory truth;
};

/// Simulates the full model from the steady state of row 0 and stores
/// y = outlet moisture + N(0, noise_std^2) in every row.
SyntheticRun attach_measurements(model::SignalLog log, const model::BilinearPart& fom,
                                 const model::DryerModel& model, double noise_std, std::uint64_t seed,
                                 const model::SimulationOptions& options = {});

/// Operating point and deviation of u-hat over the scenario ranges, from steady
/// states at the corners and centre of the input box (with a 25% margin).
void fit_reduction_window(mor::ReductionSettings& settings, const model::DryerModel& model,
                          const ScenarioSpec& spec);

} // namespace vfbd::harness
