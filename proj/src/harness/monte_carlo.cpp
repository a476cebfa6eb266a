#include "vfbd/harness/monte_carlo.hpp"

#include <array>
#include <atomic>
#include <cmath>
#include <mutex>
#include <random>
#include <thread>

#include "vfbd/errors.hpp"
#include "vfbd/observer/ekf.hpp"
#include "vfbd/stats.hpp"

namespace vfbd::harness {

namespace {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t run, std::uint64_t stream)
{
    std::seed_seq seq{std::uint32_t(base), std::uint32_t(base >> 32), std::uint32_t(run), std::uint32_t(stream)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (std::uint64_t(out[0]) << 32) | out[1];
}

} // namespace

void MonteCarloSpec::validate() const
{
    const auto fail = [](const std::string& what) { throw ConfigError("montecarlo: " + what); };
    if (runs < 1) fail("run count must be at least 1");
    if (!(duration > 0.0)) fail("duration must be positive");
    if (!(x1_offset >= 0.0 && x1_offset < 1.0) || !(x1_tilt >= 0.0) || x1_offset + 0.5 * x1_tilt >= 1.0) {
        fail("moisture perturbation must keep the profile positive");
    }
    if (!(m_h_range >= 0.0 && m_h_range < 1.0)) fail("m_h_range must lie in [0, 1)");
    if (!(eps_min > 0.0 && eps_min <= eps_max && eps_max < 1.0)) fail("porosity range must lie inside (0, 1)");
    if (!(T_s_range >= 0.0)) fail("T_s_range must be non-negative");
    if (!(p0_scale_min > 0.0 && p0_scale_min <= p0_scale_max)) fail("P0 scale range is invalid");
    if (!(noise_std >= 0.0)) fail("noise_std must be non-negative");
    if (final_samples < 1) fail("final_samples must be positive");
    if (!(state_tol > 0.0 && algebraic_tol > 0.0)) fail("thresholds must be positive");
    if (threads < 0) fail("threads must be non-negative");
}

void score_run(RunRecord& rec, const std::vector<Eigen::VectorXd>& estimates, const model::Trajectory& truth,
               int final_samples, double state_tol, double algebraic_tol)
{
    rec.state_error.clear();
    rec.algebraic_error.clear();
    const std::size_t len = std::min(estimates.size(), truth.states.size());
    for (std::size_t k = 0; k < len; ++k) {
        const Eigen::VectorXd& e = estimates[k];
        const model::ModelState& s = truth.states[k];
        const Eigen::Index n = s.x.size();
        const double ex = (e.head(n) - s.x).norm() / s.x.norm();
        const double em = std::abs(e(n) - s.m_h) / s.m_h;
        const double ee = std::abs(e(n + 1) - s.eps) / s.eps;
        const double et = std::abs(e(n + 2) - s.T_s) / std::abs(s.T_s);
        rec.state_error.push_back(std::max(ex, em));
        rec.algebraic_error.push_back(std::max(ee, et));
    }
    rec.converged = false;
    if (rec.failed || len < truth.states.size() || len < std::size_t(final_samples)) {
        return;
    }
    rec.converged = true;
    for (std::size_t k = len - final_samples; k < len; ++k) {
        if (!(rec.state_error[k] <= state_tol) || !(rec.algebraic_error[k] <= algebraic_tol)) {
            rec.converged = false;
        }
    }
}

model::FomState random_initial_state(const MonteCarloSpec& spec, const model::FomState& truth, double length,
                                     std::uint64_t seed, double* p0_scale)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double a = spec.x1_offset * unif(rng);
    const double b = spec.x1_tilt * unif(rng);
    model::FomState s = truth;
    const Eigen::Index n = s.x1.size();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double z = length * (double(i) + 1.0) / double(n);
        s.x1(i) *= 1.0 + a + b * (z / length - 0.5);
    }
    s.m_h *= 1.0 + spec.m_h_range * unif(rng);
    s.eps = spec.eps_min + (spec.eps_max - spec.eps_min) * unit(rng);
    s.T_s += spec.T_s_range * unif(rng);
    const double lp = std::log(spec.p0_scale_min) + (std::log(spec.p0_scale_max) - std::log(spec.p0_scale_min)) * unit(rng);
    if (p0_scale != nullptr) {
        *p0_scale = std::exp(lp);
    }
    return s;
}

MonteCarloResult run_monte_carlo(const MonteCarloSpec& spec, const std::vector<ObserverCandidate>& candidates,
                                 const model::BilinearPart& fom, const model::DryerModel& model,
                                 const InputEnvelope& env)
{
    spec.validate();
    if (candidates.empty()) {
        throw ConfigError("montecarlo: no observer candidates");
    }
    for (const auto& c : candidates) {
        if (c.part == nullptr || c.basis == nullptr) {
            throw ConfigError("montecarlo: candidate '" + c.name + "' lacks a model");
        }
        c.cfg.validate(model.grid().n);
    }
    ScenarioSpec base = spec.scenario;
    base.duration = spec.duration;
    validate_scenario(base, env);

    const std::size_t nc = candidates.size();
    MonteCarloResult result;
    result.records.resize(std::size_t(spec.runs) * nc);
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::string fatal;

    const auto worker = [&] {
        for (int run = next++; run < spec.runs; run = next++) {
            try {
                ScenarioSpec sc = base;
                sc.seed = derive_seed(spec.seed, std::uint64_t(run), 1);
                const SyntheticRun truth = attach_measurements(synthesize_signals(sc, env), fom, model,
                                                               spec.noise_std, derive_seed(spec.seed, run, 2));
                const model::ModelState& t0 = truth.truth.states.front();
                double p0_scale = 1.0;
                const model::FomState init = random_initial_state(
                    spec, {t0.x, t0.m_h, t0.eps, t0.T_s}, model.grid().length, derive_seed(spec.seed, run, 3),
                    &p0_scale);
                for (std::size_t c = 0; c < nc; ++c) {
                    const ObserverCandidate& cand = candidates[c];
                    RunRecord rec;
                    rec.run = run;
                    rec.observer = cand.name;
                    observer::ObserverRun obs;
                    try {
                        obs = observer::run_observer(truth.log, observer::make_ekf_state(init, cand.cfg, p0_scale),
                                                     cand.cfg, *cand.part, *cand.basis, model);
                        rec.failed = obs.failed;
                        rec.failure = obs.failure;
                    } catch (const NumericalError& e) {
                        rec.failed = true;
                        rec.failure = e.what();
                    }
                    for (std::size_t k = 1; k < obs.rows.size(); ++k) {
                        rec.step_seconds.push_back(1e-9 * double(obs.rows[k].step_ns));
                    }
                    score_run(rec, obs.estimates, truth.truth, spec.final_samples, spec.state_tol,
                              spec.algebraic_tol);
                    result.records[std::size_t(run) * nc + c] = std::move(rec);
                }
            } catch (const NumericalError& e) {
                // truth generation failed: every candidate of this run is recorded as failed
                for (std::size_t c = 0; c < nc; ++c) {
                    RunRecord rec;
                    rec.run = run;
                    rec.observer = candidates[c].name;
                    rec.failed = true;
                    rec.failure = std::string("truth: ") + e.what();
                    result.records[std::size_t(run) * nc + c] = std::move(rec);
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (fatal.empty()) {
                    fatal = e.what();
                }
                next = spec.runs;
            }
        }
    };
    int threads = spec.threads > 0 ? spec.threads : int(std::max(1u, std::thread::hardware_concurrency()));
    threads = std::min(threads, spec.runs);
    std::vector<std::thread> pool;
    for (int i = 1; i < threads; ++i) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& th : pool) {
        th.join();
    }
    if (!fatal.empty()) {
        throw ConfigError("montecarlo: " + fatal);
    }

    const std::size_t samples = std::size_t(std::lround(spec.duration / base.dt)) + 1;
    for (std::size_t k = 0; k < samples; ++k) {
        result.t.push_back(base.dt * double(k));
    }
    for (std::size_t c = 0; c < nc; ++c) {
        CandidateSummary s;
        s.observer = candidates[c].name;
        std::vector<double> steps;
        std::vector<std::vector<double>> st(samples), al(samples);
        for (int run = 0; run < spec.runs; ++run) {
            const RunRecord& rec = result.records[std::size_t(run) * nc + c];
            ++s.runs;
            s.converged += rec.converged ? 1 : 0;
            s.failed += rec.failed ? 1 : 0;
            steps.insert(steps.end(), rec.step_seconds.begin(), rec.step_seconds.end());
            if (rec.state_error.size() == samples) {
                for (std::size_t k = 0; k < samples; ++k) {
                    st[k].push_back(rec.state_error[k]);
                    al[k].push_back(rec.algebraic_error[k]);
                }
            }
        }
        for (std::size_t k = 0; k < samples; ++k) {
            const MeanStd a = mean_std(st[k]);
            const MeanStd b = mean_std(al[k]);
            s.state_mean.push_back(a.mean);
            s.state_std.push_back(a.std);
            s.algebraic_mean.push_back(b.mean);
            s.algebraic_std.push_back(b.std);
        }
        const MeanStd ts = mean_std(steps);
        s.step_mean = ts.mean;
        s.step_std = ts.std;
        result.summary.push_back(std::move(s));
    }
    return result;
}

} // namespace vfbd::harness
