#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vfbd/harness/benchmark.hpp"
#include "vfbd/harness/monte_carlo.hpp"
#include "vfbd/harness/scenario.hpp"
#include "vfbd/model/gpr.hpp"
#include "vfbd/mor/reduce.hpp"
#include "vfbd/observer/config.hpp"

namespace vfbd::harness {

/// Everything a CLI run needs. JSON sections: grid, params, gpr, scenario,
/// measurement, reduce, observer, montecarlo, bench, io. See config/default.json.
struct AppConfig {
    int grid_n = 200;
    double length = 1.0;
    model::PhysicalParams params;

    std::string gpr_training;        ///< CSV path; empty: sampled reference maps
    int gpr_points_per_axis = 5;

    ScenarioSpec scenario;
    double noise_std = 0.0;          ///< synthetic measurement noise
    std::uint64_t noise_seed = 5;

    mor::ReductionSettings reduce;
    bool fit_window = true;          ///< refit the u-hat operating window from the scenario ranges

    observer::ObserverConfig observer;
    double init_m_h_factor = 1.0;    ///< observe: initial holdup estimate relative to the truth

    MonteCarloSpec montecarlo;
    std::vector<std::string> mc_observers{"ekf2", "ekf1"};   ///< ekf1, ekf2, ekf_fom

    BenchmarkSpec bench;

    std::string signal_log;          ///< recorded log; empty: synthesize from the scenario
    std::string rom_file;            ///< saved ROM; empty: reduce on the fly

    /// Cross-section checks; throws ConfigError.
    void validate() const;
};

/// Defaults, then the file (when path is non-empty), then each "key.path=value"
/// override. Values parse as JSON, falling back to a plain string. Unknown keys
/// and type mismatches throw ConfigError naming the key.
AppConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Pretty-printed JSON of the effective configuration (loads back to the same config).
std::string config_to_json(const AppConfig& cfg);

/// All accepted key paths, dotted.
std::vector<std::string> config_keys();

} // namespace vfbd::harness
