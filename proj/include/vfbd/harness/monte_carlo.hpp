#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vfbd/harness/scenario.hpp"
#include "vfbd/mor/bilinear.hpp"
#include "vfbd/observer/config.hpp"

namespace vfbd::harness {

/// Randomized observer evaluation against full-model truth.
struct MonteCarloSpec {
    int runs = 100;
    double duration = 120.0;
    std::uint64_t seed = 11;
    double x1_offset = 0.3;      ///< initial moisture profile scaled by 1 + a + b (z/L - 1/2), |a| <= x1_offset
    double x1_tilt = 0.3;        ///< |b| <= x1_tilt
    double m_h_range = 0.25;     ///< relative holdup perturbation
    double eps_min = 0.4;        ///< initial porosity drawn from [eps_min, eps_max]
    double eps_max = 0.85;
    double T_s_range = 8.0;      ///< absolute saturation temperature perturbation (K)
    double p0_scale_min = 0.5;   ///< P0 scaled log-uniformly within [min, max]
    double p0_scale_max = 2.0;
    double noise_std = 0.0;      ///< measurement noise added to the truth outlet moisture
    int final_samples = 10;
    double state_tol = 0.02;
    double algebraic_tol = 0.01;
    int threads = 0;             ///< 0: hardware concurrency
    ScenarioSpec scenario;       ///< duration and seed are set per run

    void validate() const;
};

/// An observer under test: config plus prediction model and basis (shared read-only).
struct ObserverCandidate {
    std::string name;
    observer::ObserverConfig cfg;
    const model::BilinearPart* part = nullptr;
    const mor::RomBasis* basis = nullptr;
};

struct RunRecord {
    int run = 0;
    std::string observer;
    bool converged = false;
    bool failed = false;
    std::string failure;
    std::vector<double> state_error;       ///< max(|dx1|/|x1|, |dm_h|/m_h) per sample
    std::vector<double> algebraic_error;   ///< max(|deps|/eps, |dT_s|/|T_s|) per sample
    std::vector<double> step_seconds;
};

struct CandidateSummary {
    std::string observer;
    int runs = 0;
    int converged = 0;
    int failed = 0;
    std::vector<double> state_mean, state_std, algebraic_mean, algebraic_std;
    double step_mean = 0.0;
    double step_std = 0.0;

    double convergence_rate() const { return runs > 0 ? double(converged) / runs : 0.0; }
};

struct MonteCarloResult {
    std::vector<double> t;
    std::vector<RunRecord> records;   ///< run-major, candidate order within a run
    std::vector<CandidateSummary> summary;
};

/// Per-sample errors of an estimate sequence against the truth.
void score_run(RunRecord& rec, const std::vector<Eigen::VectorXd>& estimates, const model::Trajectory& truth,
               int final_samples, double state_tol, double algebraic_tol);

/// The random initial estimate of one run around the truth at t = 0.
model::FomState random_initial_state(const MonteCarloSpec& spec, const model::FomState& truth, double length,
                                     std::uint64_t seed, double* p0_scale);

MonteCarloResult run_monte_carlo(const MonteCarloSpec& spec, const std::vector<ObserverCandidate>& candidates,
                                 const model::BilinearPart& fom, const model::DryerModel& model,
                                 const InputEnvelope& env);

} // namespace vfbd::harness
