// Command-line front end: synth, simulate, reduce, observe, montecarlo, bench.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "vfbd/errors.hpp"
#include "vfbd/harness/config.hpp"
#include "vfbd/harness/pipeline.hpp"
#include "vfbd/harness/results.hpp"
#include "vfbd/harness/signal_io.hpp"
#include "vfbd/mor/error_report.hpp"
#include "vfbd/mor/rom_file.hpp"
#include "vfbd/observer/ekf.hpp"

namespace {

using namespace vfbd;
using namespace vfbd::harness;

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3, kIo = 4 };

struct Common {
    std::string config;
    std::vector<std::string> overrides;
    std::string out;
};

// The effective config is written next to the tables and listed in the manifest.
void finish(ResultSet& rs, const AppConfig& cfg, const std::string& out)
{
    std::filesystem::create_directories(out);
    const std::string path = out + "/config.json";
    std::ofstream f(path, std::ios::binary);
    f << config_to_json(cfg);
    if (!f) {
        throw IoError("cannot write " + path);
    }
    f.close();
    rs.attachments.push_back("config.json");
    const auto manifest = emit_results(rs, out);
    fmt::print("wrote {} files to {}\n", manifest.size(), out);
}

int cmd_synth(const AppConfig& cfg, const std::string& out)
{
    const auto model = build_model(cfg, cfg.grid_n);
    const auto fom = mor::build_bilinear_fom(model.q(), model.grid());
    AppConfig c = cfg;
    c.signal_log.clear();
    const SyntheticRun run = prepare_signals(c, model, fom);
    ResultSet rs;
    rs.tables.push_back(signal_table("signals.csv", run.log));
    rs.tables.push_back(trajectory_table("truth.csv", run.truth));
    finish(rs, cfg, out);
    fmt::print("{} samples, dt = {} s\n", run.log.size(), run.log.dt());
    return kOk;
}

int cmd_simulate(const AppConfig& cfg, const std::string& out, const std::string& which)
{
    const auto model = build_model(cfg, cfg.grid_n);
    const auto fom = mor::build_bilinear_fom(model.q(), model.grid());
    const SyntheticRun sig = prepare_signals(cfg, model, fom);
    const auto x0 = model::steady_state(model, sig.log.samples.front().u, sig.log.samples.front().w);
    ResultSet rs;
    model::Trajectory tf;
    if (which != "rom") {
        tf = model::simulate(fom, model, sig.log, {x0.x1, x0.m_h, x0.eps, x0.T_s}, cfg.observer.prediction);
        rs.tables.push_back(trajectory_table("fom.csv", tf));
        rs.tables.push_back(step_time_table("fom_step_times.csv", tf));
    }
    if (which != "fom") {
        const PreparedRom rom = prepare_rom(cfg, model, fom);
        const auto tr = model::simulate(rom.rom, model, sig.log, {rom.basis.project(x0.x1), x0.m_h, x0.eps, x0.T_s},
                                        cfg.observer.prediction);
        rs.tables.push_back(trajectory_table("rom.csv", tr));
        rs.tables.push_back(step_time_table("rom_step_times.csv", tr));
        if (which == "both") {
            const auto rep = mor::compare_trajectories(tf, tr, rom.basis);
            rs.tables.push_back(rom_report_table("rom_error.csv", rep));
            fmt::print("relative MSE {:.3e}, max error {:.3e} kg/kg, speedup {:.1f}\n", rep.relative_mse,
                       rep.max_abs_error, rep.speedup);
        }
    }
    finish(rs, cfg, out);
    return kOk;
}

int cmd_reduce(const AppConfig& cfg, const std::string& out)
{
    const auto model = build_model(cfg, cfg.grid_n);
    const auto fom = mor::build_bilinear_fom(model.q(), model.grid());
    AppConfig c = cfg;
    c.rom_file.clear();
    const PreparedRom rom = prepare_rom(c, model, fom);
    const SyntheticRun sig = prepare_signals(cfg, model, fom);
    const auto rep = mor::rom_error_report(fom, rom.rom, rom.basis, model, sig.log, cfg.observer.prediction);
    ResultSet rs;
    rs.tables.push_back(reduction_log_table("reduction_log.csv", *rom.reduction));
    rs.tables.push_back(rom_report_table("rom_error.csv", rep));
    std::filesystem::create_directories(out);
    mor::save_rom(out + "/rom.txt", rom.rom, rom.basis);
    rs.attachments.push_back("rom.txt");
    finish(rs, cfg, out);
    fmt::print("r = {}, best iteration {}, relative MSE {:.3e}, max error {:.3e} kg/kg\n", rom.basis.reduced_order(),
               rom.reduction->best_iteration, rep.relative_mse, rep.max_abs_error);
    return kOk;
}

int cmd_observe(const AppConfig& cfg, const std::string& out, const std::string& prediction)
{
    const auto model = build_model(cfg, cfg.grid_n);
    const auto fom = mor::build_bilinear_fom(model.q(), model.grid());
    const SyntheticRun sig = prepare_signals(cfg, model, fom);
    auto x0 = model::steady_state(model, sig.log.samples.front().u, sig.log.samples.front().w);
    x0.m_h *= cfg.init_m_h_factor;
    x0 = [&] {
        const auto c = model::make_consistent(model, {x0.x1, x0.m_h, x0.eps, x0.T_s}, sig.log.samples.front().u,
                                              sig.log.samples.front().w);
        return model::FomState{c.x, c.m_h, c.eps, c.T_s};
    }();
    const observer::EkfState init = observer::make_ekf_state(x0, cfg.observer);
    observer::ObserverRun run;
    if (prediction == "fom") {
        run = observer::run_observer(sig.log, init, cfg.observer, fom, mor::RomBasis::make_identity(cfg.grid_n), model);
    } else {
        const PreparedRom rom = prepare_rom(cfg, model, fom);
        run = observer::run_observer(sig.log, init, cfg.observer, rom.rom, rom.basis, model);
    }
    ResultSet rs;
    rs.tables.push_back(observer_table("observer.csv", run.rows));
    if (!sig.truth.t.empty()) {
        rs.tables.push_back(trajectory_table("truth.csv", sig.truth));
    }
    finish(rs, cfg, out);
    if (run.failed) {
        throw NumericalError("observer failed at " + run.failure);
    }
    const auto& last = run.rows.back();
    fmt::print("{} steps, final m_h {:.5g} kg, eps {:.4g}, T_s {:.4g} C\n", run.rows.size() - 1, last.m_h, last.eps,
               last.T_s);
    return kOk;
}

int cmd_montecarlo(const AppConfig& cfg, const std::string& out)
{
    const auto model = build_model(cfg, cfg.grid_n);
    const auto fom = mor::build_bilinear_fom(model.q(), model.grid());
    bool need_rom = false;
    for (const auto& o : cfg.mc_observers) {
        need_rom = need_rom || o != "ekf_fom";
    }
    std::optional<PreparedRom> rom;
    if (need_rom) {
        rom = prepare_rom(cfg, model, fom);
    }
    const mor::RomBasis identity = mor::RomBasis::make_identity(cfg.grid_n);
    std::vector<ObserverCandidate> cands;
    for (const auto& o : cfg.mc_observers) {
        ObserverCandidate c{o, cfg.observer, nullptr, nullptr};
        if (o == "ekf_fom") {
            c.cfg.variant = 2;
            c.part = &fom;
            c.basis = &identity;
        } else {
            c.cfg.variant = o == "ekf1" ? 1 : 2;
            c.part = &rom->rom;
            c.basis = &rom->basis;
        }
        cands.push_back(std::move(c));
    }
    MonteCarloSpec spec = cfg.montecarlo;
    spec.scenario = cfg.scenario;
    const auto mc = run_monte_carlo(spec, cands, fom, model, InputEnvelope::from_gpr(model.gpr()));
    ResultSet rs;
    rs.tables = monte_carlo_tables("mc_", mc);
    finish(rs, cfg, out);
    for (const auto& s : mc.summary) {
        fmt::print("{:8s} converged {}/{} ({} failed), step {:.3f} +- {:.3f} ms\n", s.observer, s.converged, s.runs,
                   s.failed, 1e3 * s.step_mean, 1e3 * s.step_std);
    }
    return kOk;
}

int cmd_bench(const AppConfig& cfg, const std::string& out)
{
    BenchmarkSpec spec = cfg.bench;
    spec.length = cfg.length;
    spec.reduction = cfg.reduce;
    spec.observer = cfg.observer;
    spec.scenario = cfg.scenario;
    const TimingReport rep = run_benchmark(spec, cfg.params, build_gpr(cfg));
    ResultSet rs;
    rs.tables.push_back(timing_table("timing.csv", rep));
    finish(rs, cfg, out);
    fmt::print("{:>6} {:>3} {:8} {:>10} {:>10}\n", "N", "r", "module", "mean ms", "std ms");
    for (const auto& c : rep.cells) {
        if (c.available) {
            fmt::print("{:>6} {:>3} {:8} {:>10.4f} {:>10.4f}{}\n", c.n, c.r, c.module, c.mean_ms, c.std_ms,
                       c.noisy ? "  noisy" : "");
        } else {
            fmt::print("{:>6} {:>3} {:8} {:>10} {:>10}  {}\n", c.n, c.r, c.module, "-", "-", c.note);
        }
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"vibrated fluid bed dryer: simulation, reduction and state estimation"};
    app.require_subcommand(1);
    Common common;
    std::string which = "both";
    std::string prediction = "rom";
    bool dump = false;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", common.config, "JSON configuration file");
        sub->add_option("-s,--set", common.overrides, "override, e.g. --set observer.variant=1")->take_all();
        sub->add_option("-o,--out", common.out, "output directory")->default_str("results/<command>");
        sub->add_flag("--print-config", dump, "print the effective configuration and exit");
        return sub;
    };
    auto* synth = add_common(app.add_subcommand("synth", "synthetic signal log with full-model measurements"));
    auto* simulate = add_common(app.add_subcommand("simulate", "forward simulation of FOM and/or ROM"));
    simulate->add_option("--model", which, "fom, rom or both")->check(CLI::IsMember({"fom", "rom", "both"}));
    auto* reduce = add_common(app.add_subcommand("reduce", "reduce the model and save the ROM"));
    auto* observe = add_common(app.add_subcommand("observe", "run one observer over a signal log"));
    observe->add_option("--prediction", prediction, "rom or fom")->check(CLI::IsMember({"rom", "fom"}));
    auto* mc = add_common(app.add_subcommand("montecarlo", "randomized observer convergence study"));
    auto* bench = add_common(app.add_subcommand("bench", "one-step timing table"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    CLI::App* sub = app.get_subcommands().front();
    if (common.out.empty()) {
        common.out = "results/" + sub->get_name();
    }
    try {
        const AppConfig cfg = load_config(common.config, common.overrides);
        if (dump) {
            std::cout << config_to_json(cfg);
            return kOk;
        }
        if (sub == synth) return cmd_synth(cfg, common.out);
        if (sub == simulate) return cmd_simulate(cfg, common.out, which);
        if (sub == reduce) return cmd_reduce(cfg, common.out);
        if (sub == observe) return cmd_observe(cfg, common.out, prediction);
        if (sub == mc) return cmd_montecarlo(cfg, common.out);
        if (sub == bench) return cmd_bench(cfg, common.out);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const DimensionError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kIo;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    }
    return kOk;
}
