// Acceptance suite: one PASS/FAIL line per criterion. Arguments select criteria
// by number (default: all). Exit status 1 when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "vfbd/harness/benchmark.hpp"
#include "vfbd/harness/config.hpp"
#include "vfbd/harness/monte_carlo.hpp"
#include "vfbd/harness/pipeline.hpp"
#include "vfbd/harness/scenario.hpp"
#include "vfbd/model/simulation.hpp"
#include "vfbd/mor/bilinear.hpp"
#include "vfbd/mor/error_report.hpp"
#include "vfbd/mor/reduce.hpp"
#include "vfbd/numerics/collocation.hpp"
#include "vfbd/numerics/expm.hpp"
#include "vfbd/numerics/sylvester.hpp"
#include "vfbd/observer/ekf.hpp"
#include "vfbd/observer/jacobians.hpp"
#include "closures.hpp"
#include "oracles.hpp"

namespace {

using namespace vfbd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Check {
    bool ok = true;
    std::vector<std::string> parts;

    void add(bool cond, const std::string& text)
    {
        ok = ok && cond;
        parts.push_back(text + (cond ? "" : " [x]"));
    }
    Outcome done() const
    {
        std::string s;
        for (const auto& p : parts) s += (s.empty() ? "" : "; ") + p;
        return {ok, s};
    }
};

harness::AppConfig defaults(int n)
{
    harness::AppConfig cfg = harness::load_config("");
    cfg.grid_n = n;
    return cfg;
}

// 1. ROM accuracy at N=200, r=7 on the 30-minute scenario.
Outcome rom_accuracy()
{
    const harness::AppConfig cfg = defaults(200);
    const auto model = harness::build_model(cfg, cfg.grid_n);
    const auto fom = mor::build_bilinear_fom(model.q(), model.grid());
    const harness::PreparedRom rom = harness::prepare_rom(cfg, model, fom);
    const model::SignalLog log = harness::synthesize_signals(cfg.scenario, harness::InputEnvelope::from_gpr(model.gpr()));
    const mor::RomErrorReport rep = mor::rom_error_report(fom, rom.rom, rom.basis, model, log);
    Check c;
    c.add(rom.basis.reduced_order() == 7 && log.duration() == 1800.0,
          fmt::format("N=200 r={} {} s", rom.basis.reduced_order(), log.duration()));
    c.add(rep.relative_mse <= 3e-3, fmt::format("relMSE={:.3e} (<=3e-3)", rep.relative_mse));
    c.add(rep.max_abs_error <= 5e-3, fmt::format("max error={:.3e} kg/kg (<=5e-3)", rep.max_abs_error));
    return c.done();
}

harness::TimingReport benchmark()
{
    const harness::AppConfig cfg = defaults(200);
    harness::BenchmarkSpec spec = cfg.bench;
    spec.grid_sizes = {100, 200, 500, 1000};
    spec.length = cfg.length;
    spec.reduction = cfg.reduce;
    spec.observer = cfg.observer;
    spec.scenario = cfg.scenario;
    return harness::run_benchmark(spec, cfg.params, harness::build_gpr(cfg));
}

// 2. FOM/ROM one-step speedup at N=1000.
Outcome speedup(const harness::TimingReport& rep)
{
    const auto* f = rep.find(1000, "FOM");
    const auto* r = rep.find(1000, "ROM");
    Check c;
    if (f == nullptr || r == nullptr || !f->available || !r->available || !(r->mean_ms > 0.0)) {
        c.add(false, "N=1000 timing cells missing");
        return c.done();
    }
    const double s = f->mean_ms / r->mean_ms;
    c.add(s >= 10.0, fmt::format("FOM {:.4f} ms / ROM {:.4f} ms = {:.1f} (>=10)", f->mean_ms, r->mean_ms, s));
    return c.done();
}

// 6. Observer cost ordering.
Outcome cost_ordering(const harness::TimingReport& rep)
{
    Check c;
    const auto* ef = rep.find(100, "EKF_FOM");
    const auto* e2 = rep.find(100, "EKF2");
    if (ef == nullptr || e2 == nullptr || !ef->available || !e2->available) {
        c.add(false, "N=100 observer cells missing");
        return c.done();
    }
    const double ratio = ef->mean_ms / e2->mean_ms;
    c.add(ratio >= 100.0, fmt::format("N=100 EKF_FOM {:.3f} ms / EKF2 {:.4f} ms = {:.0f} (>=100)", ef->mean_ms,
                                      e2->mean_ms, ratio));
    for (int n : {100, 200, 500, 1000}) {
        const auto* a = rep.find(n, "EKF1");
        const auto* b = rep.find(n, "EKF2");
        if (a == nullptr || b == nullptr || !a->available || !b->available) {
            continue;
        }
        c.add(b->mean_ms >= a->mean_ms, fmt::format("N={} EKF2 {:.4f} >= EKF1 {:.4f} ms", n, b->mean_ms, a->mean_ms));
    }
    return c.done();
}

struct McSetup {
    harness::AppConfig cfg;
    model::DryerModel model;
    mor::BilinearSystem fom;
    harness::PreparedRom rom;
    mor::RomBasis identity;

    explicit McSetup(int n)
        : cfg(defaults(n)), model(harness::build_model(cfg, n)),
          fom(mor::build_bilinear_fom(model.q(), model.grid())), rom(harness::prepare_rom(cfg, model, fom)),
          identity(mor::RomBasis::make_identity(n))
    {
    }

    harness::ObserverCandidate rom_candidate(const std::string& name, int variant) const
    {
        harness::ObserverCandidate c{name, cfg.observer, &rom.rom, &rom.basis};
        c.cfg.variant = variant;
        return c;
    }

    harness::MonteCarloResult run(const std::vector<harness::ObserverCandidate>& cands) const
    {
        harness::MonteCarloSpec spec = cfg.montecarlo;
        spec.scenario = cfg.scenario;
        return harness::run_monte_carlo(spec, cands, fom, model, harness::InputEnvelope::from_gpr(model.gpr()));
    }
};

const harness::CandidateSummary& summary_of(const harness::MonteCarloResult& mc, const std::string& name)
{
    for (const auto& s : mc.summary) {
        if (s.observer == name) return s;
    }
    throw std::runtime_error("no summary for " + name);
}

// 3 and 4. Variant robustness and contrast over the same 100 seeds at N=200.
std::pair<Outcome, Outcome> variant_study()
{
    const McSetup s(200);
    const harness::MonteCarloResult mc = s.run({s.rom_candidate("ekf2", 2), s.rom_candidate("ekf1", 1)});
    const auto& v2 = summary_of(mc, "ekf2");
    const auto& v1 = summary_of(mc, "ekf1");
    const int fin = s.cfg.montecarlo.final_samples;
    const double tol = s.cfg.montecarlo.algebraic_tol;

    Check c3;
    c3.add(v2.runs == 100, fmt::format("{} runs of {} s", v2.runs, s.cfg.montecarlo.duration));
    c3.add(v2.converged == v2.runs, fmt::format("EKF2 converged {}/{}", v2.converged, v2.runs));

    // persistent algebraic error: variant 1 above the threshold over the whole
    // final window of a run where variant 2 converged
    int persistent = 0;
    double worst_alg = 0.0;
    for (std::size_t i = 0; i + 1 < mc.records.size(); i += 2) {
        const auto& r2 = mc.records[i];
        const auto& r1 = mc.records[i + 1];
        if (r1.failed || r1.algebraic_error.size() < std::size_t(fin)) continue;
        const auto first = r1.algebraic_error.end() - fin;
        const double lo = *std::min_element(first, r1.algebraic_error.end());
        worst_alg = std::max(worst_alg, lo);
        if (lo > tol && r2.converged) ++persistent;
    }
    Check c4;
    c4.add(v1.convergence_rate() < v2.convergence_rate(),
           fmt::format("rate EKF1 {:.2f} < EKF2 {:.2f}", v1.convergence_rate(), v2.convergence_rate()));
    c4.add(persistent >= 1, fmt::format("runs with persistent EKF1 algebraic error: {} (largest final-window "
                                        "minimum {:.2e}, threshold {:.0e})",
                                        persistent, worst_alg, tol));
    return {c3.done(), c4.done()};
}

// 5. FOM-based against ROM-based variant-2 observer at N=30.
Outcome reduction_impact()
{
    const McSetup s(30);
    harness::ObserverCandidate fc{"ekf_fom", s.cfg.observer, &s.fom, &s.identity};
    fc.cfg.variant = 2;
    const harness::MonteCarloResult mc = s.run({s.rom_candidate("ekf2", 2), fc});
    const auto& r = summary_of(mc, "ekf2");
    const auto& f = summary_of(mc, "ekf_fom");
    Check c;
    c.add(r.runs == 100 && r.converged == r.runs, fmt::format("ROM observer {}/{}", r.converged, r.runs));
    c.add(f.runs == 100 && f.converged == f.runs, fmt::format("FOM observer {}/{}", f.converged, f.runs));
    std::size_t bad_state = 0;
    std::size_t bad_alg = 0;
    double worst = 0.0;
    for (std::size_t k = 0; k < r.state_mean.size(); ++k) {
        bad_state += f.state_mean[k] > 1.1 * r.state_mean[k];
        bad_alg += f.algebraic_mean[k] > 1.1 * r.algebraic_mean[k];
        if (r.state_mean[k] > 0.0) worst = std::max(worst, f.state_mean[k] / r.state_mean[k]);
    }
    c.add(bad_state == 0, fmt::format("state mean FOM <= 1.1 ROM at {}/{} samples (max ratio {:.3f})",
                                      r.state_mean.size() - bad_state, r.state_mean.size(), worst));
    c.add(bad_alg == 0, fmt::format("algebraic mean FOM <= 1.1 ROM at {}/{} samples",
                                    r.algebraic_mean.size() - bad_alg, r.algebraic_mean.size()));
    return c.done();
}

model::DryerModel small_model(int n)
{
    return model::DryerModel(model::make_grid(n, 1.0), model::PhysicalParams{},
                             model::fit_gpr_set(model::synthetic_gpr_training()));
}

model::SignalLog short_log(double duration, std::uint64_t seed, const model::DryerModel& m)
{
    harness::ScenarioSpec sc;
    sc.duration = duration;
    sc.level_duration = 40.0;
    sc.seed = seed;
    return harness::synthesize_signals(sc, harness::InputEnvelope::from_gpr(m.gpr()));
}

// 7. Oracle equivalences.
Outcome oracles()
{
    Check c;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unif(0.0, 0.4);

    double pde = 0.0;
    for (int n : {5, 20, 50}) {
        const auto m = small_model(n);
        const auto fom = mor::build_bilinear_fom(m.q(), m.grid());
        for (int trial = 0; trial < 5; ++trial) {
            model::PlantInputs u;
            u.mdot_a = 0.03 + 0.05 * unif(rng);
            model::Disturbances w;
            w.phi_a = 0.02 + 0.2 * unif(rng);
            model::FomState st{VectorXd(n), 0.3 + unif(rng) / 2, 0.5 + unif(rng) / 2, 20.0 + 30.0 * unif(rng)};
            for (int i = 0; i < n; ++i) st.x1(i) = unif(rng);
            const VectorXd ref = closure::direct_pde(st, u, w, m);
            const VectorXd got = fom.rhs(st.x1, model::eval_vector_field(st.m_h, st.eps, st.T_s, u, w, m));
            pde = std::max(pde, (got - ref).lpNorm<Eigen::Infinity>() / ref.lpNorm<Eigen::Infinity>());
        }
    }
    c.add(pde <= 1e-12, fmt::format("bilinear vs direct rhs {:.1e} (<=1e-12)", pde));

    double jac = 0.0;
    {
        const auto m = small_model(40);
        const auto fom = mor::build_bilinear_fom(m.q(), m.grid());
        const mor::ReductionResult red = mor::reduce_h2(fom);
        const model::PlantInputs u;
        const model::Disturbances w;
        const model::FomState st = model::steady_state(m, u, w);
        for (const model::BilinearPart* part : {static_cast<const model::BilinearPart*>(&red.rom),
                                                static_cast<const model::BilinearPart*>(&fom)}) {
            const Eigen::Index r = part->order();
            VectorXd v(r + 3);
            v << (r == 40 ? st.x1 : red.basis.project(st.x1)), 1.05 * st.m_h, st.eps, st.T_s;
            v.tail(2) = model::solve_algebraic(m.constraints(), v(r), u, w, v.tail(2));
            const observer::JacobianSet j = observer::assemble_jacobians(v.head(r + 1), v.tail(2), u, w, *part, m);
            const auto f = [&](const VectorXd& p) -> VectorXd {
                VectorXd out(r + 1);
                out.head(r) = part->rhs(p.head(r), model::eval_vector_field(p(r), p(r + 1), p(r + 2), u, w, m));
                out(r) = m.holdup_rate(p(r), p(r + 1), m.coefficients(u), w);
                return out;
            };
            const auto g = [&](const VectorXd& p) -> VectorXd {
                return m.constraints().residual(p(r), p(r + 1), p(r + 2), u, w);
            };
            const auto rel = [](const MatrixXd& a, const MatrixXd& b) {
                return (a - b).cwiseAbs().maxCoeff() / std::max(a.cwiseAbs().maxCoeff(), 1e-12);
            };
            const MatrixXd jf = oracle::central_jacobian(f, v, 1e-6);
            const MatrixXd jg = oracle::central_jacobian(g, v, 1e-6);
            jac = std::max({jac, rel(j.J1, jf.leftCols(r + 1)), rel(j.J2, jf.rightCols(2)),
                            rel(j.J3, jg.leftCols(r + 1)), rel(j.J4, jg.rightCols(2))});
        }
    }
    c.add(jac <= 1e-5, fmt::format("jacobian blocks vs central differences {:.1e} (<=1e-5)", jac));

    double syl = 0.0;
    for (auto [n, r] : {std::pair{8, 3}, std::pair{20, 4}}) {
        const MatrixXd a = 0.3 * oracle::random_matrix(n, n, rng) - 2.0 * MatrixXd::Identity(n, n);
        const MatrixXd ar = 0.3 * oracle::random_matrix(r, r, rng) - 2.0 * MatrixXd::Identity(r, r);
        std::vector<MatrixXd> ns;
        std::vector<MatrixXd> nh;
        for (int k = 0; k < 5; ++k) {
            ns.push_back(0.2 * oracle::random_matrix(n, n, rng) / std::sqrt(double(n)));
            nh.push_back(0.2 * oracle::random_matrix(r, r, rng) / std::sqrt(double(r)));
        }
        const MatrixXd rhs = oracle::random_matrix(n, r, rng);
        const auto res = numerics::solve_generalized_sylvester(a, ar, ns, nh, rhs);
        const MatrixXd ref = oracle::kronecker_sylvester(a, MatrixXd(ar.transpose()), ns, nh, rhs);
        syl = std::max(syl, (res.solution - ref).norm() / ref.norm());
    }
    c.add(syl <= 1e-8, fmt::format("generalized Sylvester vs Kronecker {:.1e} (<=1e-8)", syl));

    double lossless = 0.0;
    double obs = 0.0;
    {
        const int n = 20;
        const auto m = small_model(n);
        const auto fom = mor::build_bilinear_fom(m.q(), m.grid());
        mor::ReductionSettings rs;
        rs.order = n;
        const mor::ReductionResult red = mor::reduce_h2(fom, rs);
        const model::SignalLog log = short_log(100.0, 12, m);
        const harness::SyntheticRun run = harness::attach_measurements(log, fom, m, 0.0, 1);
        const model::FomState x0 = model::steady_state(m, log.samples[0].u, log.samples[0].w);
        const model::Trajectory tr = model::simulate(red.rom, m, run.log,
                                                     {red.basis.project(x0.x1), x0.m_h, x0.eps, x0.T_s});
        for (std::size_t k = 0; k < tr.states.size(); ++k) {
            lossless = std::max(lossless, (red.basis.lift(tr.states[k].x) - run.truth.states[k].x).cwiseAbs().maxCoeff());
            lossless = std::max(lossless, std::abs(tr.states[k].m_h - run.truth.states[k].m_h));
        }

        const mor::RomBasis identity = mor::RomBasis::make_identity(n);
        const observer::ObserverConfig cfg;
        model::FomState init = x0;
        init.m_h *= 1.15;
        init.x1 *= 1.1;
        observer::EkfState a = observer::make_ekf_state(init, cfg);
        observer::EkfState b = a;
        for (std::size_t k = 1; k < run.log.size(); ++k) {
            const auto& smp = run.log.samples[k];
            a = observer::ekf_step(a, smp.y, smp.u, smp.w, cfg, red.rom, red.basis, m);
            b = observer::ekf_step(b, smp.y, smp.u, smp.w, cfg, fom, identity, m);
            obs = std::max(obs, (a.x - b.x).cwiseAbs().maxCoeff());
        }
    }
    c.add(lossless <= 1e-10, fmt::format("lossless r=N ROM vs FOM {:.1e} (<=1e-10)", lossless));
    c.add(obs <= 1e-8, fmt::format("lossless reduced vs full observer, 50 steps {:.1e} (<=1e-8)", obs));
    return c.done();
}

class Decay final : public numerics::SemiExplicitDae {
public:
    explicit Decay(double lambda) : lambda_(lambda) {}
    Eigen::Index differential_size() const override { return 1; }
    Eigen::Index algebraic_size() const override { return 0; }
    VectorXd rhs(const VectorXd& y, const VectorXd&) const override { return lambda_ * y; }
    VectorXd constraint(const VectorXd&, const VectorXd&) const override { return VectorXd(0); }

private:
    double lambda_;
};

// 8. Numerics.
Outcome numerics_suite()
{
    Check c;
    const auto decay_error = [](double dt) {
        const Decay ode(-1.0);
        numerics::DaeState s{VectorXd::Ones(1), VectorXd(0)};
        for (int k = 0; k < int(std::lround(1.0 / dt)); ++k) s = numerics::collocation_step(ode, s, dt);
        return std::abs(s.y(0) - std::exp(-1.0));
    };
    const double ratio = decay_error(0.25) / decay_error(0.125);
    c.add(ratio >= 16.0, fmt::format("collocation error ratio {:.1f} (>=16)", ratio));

    std::mt19937_64 rng(88);
    double ex = 0.0;
    for (int trial = 0; trial < 5; ++trial) {
        const MatrixXd m = oracle::random_matrix(8, 8, rng);
        const MatrixXd ref = oracle::taylor_expm(0.3 * m, 30);
        ex = std::max(ex, (numerics::matrix_exponential(m, 0.3) - ref).norm() / ref.norm());
    }
    c.add(ex <= 1e-9, fmt::format("expm 8x8 vs 30-term series {:.1e} (<=1e-9)", ex));

    const Decay stiff(-1e6);
    const double y1 = numerics::collocation_step(stiff, {VectorXd::Ones(1), VectorXd(0)}, 1.0).y(0);
    c.add(std::isfinite(y1) && std::abs(y1) <= 1.0, fmt::format("lambda=-1e6, dt=1: |y1|={:.2e} (<=1)", std::abs(y1)));
    return c.done();
}

void report(int id, const char* name, const Outcome& o, double seconds)
{
    fmt::print("{} {}. {}: {} ({:.1f} s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail, seconds);
    std::fflush(stdout);
}

} // namespace

int main(int argc, char** argv)
{
    std::set<int> want;
    for (int i = 1; i < argc; ++i) want.insert(std::atoi(argv[i]));
    const auto on = [&](int id) { return want.empty() || want.count(id) > 0; };
    bool all = true;
    const auto timed = [&](int id, const char* name, const std::function<Outcome()>& fn) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        report(id, name, o, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
        all = all && o.pass;
    };

    if (on(1)) timed(1, "ROM accuracy", rom_accuracy);
    if (on(2) || on(6)) {
        const auto t0 = std::chrono::steady_clock::now();
        std::optional<harness::TimingReport> rep;
        std::string err;
        try {
            rep = benchmark();
        } catch (const std::exception& e) {
            err = e.what();
        }
        const double bench_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const auto from = [&](auto fn) { return rep ? fn(*rep) : Outcome{false, "benchmark error: " + err}; };
        if (on(2)) timed(2, "ROM speedup", [&] { return from(speedup); });
        if (on(6)) timed(6, "observer cost ordering", [&] { return from(cost_ordering); });
        fmt::print("     (benchmark {:.1f} s)\n", bench_s);
    }
    if (on(3) || on(4)) {
        const auto t0 = std::chrono::steady_clock::now();
        std::pair<Outcome, Outcome> r;
        try {
            r = variant_study();
        } catch (const std::exception& e) {
            r.first = r.second = {false, std::string("error: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (on(3)) { report(3, "variant 2 robustness", r.first, s); all = all && r.first.pass; }
        if (on(4)) { report(4, "variant contrast", r.second, s); all = all && r.second.pass; }
    }
    if (on(5)) timed(5, "reduction impact on observation", reduction_impact);
    if (on(7)) timed(7, "oracle equivalences", oracles);
    if (on(8)) timed(8, "numerics", numerics_suite);
    return all ? 0 : 1;
}
