#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vfbd/harness/scenario.hpp"
#include "vfbd/model/gpr.hpp"
#include "vfbd/mor/reduce.hpp"
#include "vfbd/observer/config.hpp"

namespace vfbd::harness {

struct BenchmarkSpec {
    std::vector<int> grid_sizes{100, 200, 500, 1000};
    int warmup = 10;
    int samples = 60;
    double length = 1.0;
    mor::ReductionSettings reduction;   ///< operating window refit from the scenario
    observer::ObserverConfig observer;
    ScenarioSpec scenario;              ///< duration is set from warmup + samples
    double init_m_h_factor = 1.0;       ///< holdup offset of the observer start; 1 = tracking from the truth
    double noisy_ratio = 0.5;

    void validate() const;
};

/// One Table-1 cell: one-step wall time of a module at a grid size.
struct TimingCell {
    int n = 0;
    int r = 0;
    std::string module;        ///< FOM, ROM, EKF_FOM, EKF1, EKF2
    double mean_ms = 0.0;
    double std_ms = 0.0;
    std::size_t samples = 0;
    bool available = true;     ///< false above the expm cap or after a failure
    bool noisy = false;        ///< std / mean above the sanity ratio
    std::string note;
};

struct TimingReport {
    std::vector<TimingCell> cells;

    const TimingCell* find(int n, const std::string& module) const;
};

inline const char* const kBenchmarkModules[] = {"FOM", "ROM", "EKF_FOM", "EKF1", "EKF2"};

/// Runs each module in its own pass over a synthetic log, timing only the step call.
TimingReport run_benchmark(const BenchmarkSpec& spec, const model::PhysicalParams& params,
                           const model::GprSet& gpr);

} // namespace vfbd::harness
