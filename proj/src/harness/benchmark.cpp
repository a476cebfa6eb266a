#include "vfbd/harness/benchmark.hpp"

#include <chrono>
#include <algorithm>
#include <functional>
#include <optional>
#include <sstream>

#include "vfbd/errors.hpp"
#include "vfbd/model/simulation.hpp"
#include "vfbd/observer/ekf.hpp"
#include "vfbd/stats.hpp"

namespace vfbd::harness {

namespace {

struct Lane {
    std::string module;
    std::function<void(std::size_t)> step;
    std::vector<double> seconds;
    bool available = true;
    std::string note;
};

} // namespace

void BenchmarkSpec::validate() const
{
    if (grid_sizes.empty()) {
        throw ConfigError("bench: no grid sizes");
    }
    for (int n : grid_sizes) {
        if (n < 2) {
            throw ConfigError("bench: grid sizes must be at least 2");
        }
    }
    if (warmup < 0 || samples < 30) {
        throw ConfigError("bench: need warmup >= 0 and at least 30 samples");
    }
    if (!(length > 0.0) || !(init_m_h_factor > 0.0) || !(noisy_ratio > 0.0)) {
        throw ConfigError("bench: length, init factor and noise ratio must be positive");
    }
}

const TimingCell* TimingReport::find(int n, const std::string& module) const
{
    for (const auto& c : cells) {
        if (c.n == n && c.module == module) {
            return &c;
        }
    }
    return nullptr;
}

TimingReport run_benchmark(const BenchmarkSpec& spec, const model::PhysicalParams& params,
                           const model::GprSet& gpr)
{
    spec.validate();
    TimingReport report;
    ScenarioSpec sc = spec.scenario;
    sc.duration = sc.dt * double(spec.warmup + spec.samples);
    const InputEnvelope env = InputEnvelope::from_gpr(gpr);

    for (int n : spec.grid_sizes) {
        const model::DryerModel model(model::make_grid(n, spec.length), params, gpr);
        const mor::BilinearSystem fom = mor::build_bilinear_fom(model.q(), model.grid());
        mor::ReductionSettings rs = spec.reduction;
        rs.order = std::min(rs.order, n);
        fit_reduction_window(rs, model, sc);
        const mor::ReductionResult red = mor::reduce_h2(fom, rs);
        const mor::RomBasis identity = mor::RomBasis::make_identity(n);
        const model::SignalLog log = synthesize_signals(sc, env);
        const model::FomState x0 = model::steady_state(model, log.samples[0].u, log.samples[0].w);

        // module lanes; the FOM lane also produces the measurements
        model::ModelState fom_state{x0.x1, x0.m_h, x0.eps, x0.T_s};
        model::ModelState rom_state{red.basis.project(x0.x1), x0.m_h, x0.eps, x0.T_s};
        double y_k = 0.0;
        model::FomState init = x0;
        init.m_h *= spec.init_m_h_factor;
        observer::ObserverConfig c1 = spec.observer;
        c1.variant = 1;
        c1.dt = sc.dt;
        observer::ObserverConfig c2 = spec.observer;
        c2.variant = 2;
        c2.dt = sc.dt;
        observer::EkfState e_fom = observer::make_ekf_state(init, c2);
        observer::EkfState e1 = observer::make_ekf_state(init, c1);
        observer::EkfState e2 = observer::make_ekf_state(init, c2);

        std::vector<Lane> lanes;
        const auto add = [&](const char* name, std::function<void(std::size_t)> fn) {
            Lane lane;
            lane.module = name;
            lane.step = std::move(fn);
            lanes.push_back(std::move(lane));
        };
        add("FOM", [&](std::size_t k) {
                             const auto& s = log.samples[k];
                             fom_state = model::advance(fom, model, fom_state, s.u, s.w, sc.dt);
                         });
        add("ROM", [&](std::size_t k) {
                             const auto& s = log.samples[k];
                             rom_state = model::advance(red.rom, model, rom_state, s.u, s.w, sc.dt);
                         });
        add("EKF_FOM", [&](std::size_t k) {
                             const auto& s = log.samples[k];
                             e_fom = observer::ekf_step(e_fom, y_k, s.u, s.w, c2, fom, identity, model);
                         });
        add("EKF1", [&](std::size_t k) {
                             const auto& s = log.samples[k];
                             e1 = observer::ekf_step(e1, y_k, s.u, s.w, c1, red.rom, red.basis, model);
                         });
        add("EKF2", [&](std::size_t k) {
                             const auto& s = log.samples[k];
                             e2 = observer::ekf_step(e2, y_k, s.u, s.w, c2, red.rom, red.basis, model);
                         });
        if (n + 3 > spec.observer.expm_cap) {
            lanes[2].available = false;
            std::ostringstream msg;
            msg << "state dimension " << n + 3 << " above the expm cap " << spec.observer.expm_cap;
            lanes[2].note = msg.str();
        }

        // One pass per module, each with its own warm-up. The FOM pass records the
        // measurements the filters consume afterwards.
        std::vector<double> ys(log.size(), 0.0);
        for (std::size_t l = 0; l < lanes.size(); ++l) {
            Lane& lane = lanes[l];
            for (std::size_t k = 1; k < log.size() && lane.available; ++k) {
                y_k = ys[k];
                const auto t0 = std::chrono::steady_clock::now();
                try {
                    lane.step(k);
                } catch (const NumericalError& e) {
                    lane.available = false;
                    lane.note = std::string("failed: ") + e.what();
                    break;
                }
                const auto t1 = std::chrono::steady_clock::now();
                if (k > std::size_t(spec.warmup)) {
                    lane.seconds.push_back(std::chrono::duration<double>(t1 - t0).count());
                }
                if (l == 0) {
                    ys[k] = fom.output(fom_state.x);
                }
            }
            if (l == 0 && !lane.available) {
                for (std::size_t j = 1; j < lanes.size(); ++j) {
                    lanes[j].available = false;
                    lanes[j].note = "no measurements: FOM pass failed";
                }
                break;
            }
        }

        for (const Lane& lane : lanes) {
            TimingCell cell;
            cell.n = n;
            cell.r = lane.module == "FOM" || lane.module == "EKF_FOM" ? n : red.basis.reduced_order();
            cell.module = lane.module;
            cell.available = lane.available;
            cell.note = lane.note;
            const MeanStd ms = mean_std(lane.seconds);
            cell.samples = ms.count;
            if (lane.available) {
                cell.mean_ms = 1e3 * ms.mean;
                cell.std_ms = 1e3 * ms.std;
                cell.noisy = cell.mean_ms > 0.0 && cell.std_ms / cell.mean_ms > spec.noisy_ratio;
            }
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

} // namespace vfbd::harness
