#include "vfbd/harness/scenario.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "vfbd/errors.hpp"

namespace vfbd::harness {

namespace {

constexpr int kChannels = 7;

std::array<double, kChannels> pack(const model::PlantInputs& u, const model::Disturbances& w)
{
    return {u.T_a, u.mdot_a, u.a_vib, u.dP, w.mdot_s, w.mdot_l, w.phi_a};
}

void unpack(const std::array<double, kChannels>& a, model::PlantInputs& u, model::Disturbances& w)
{
    u.T_a = a[0];
    u.mdot_a = a[1];
    u.a_vib = a[2];
    u.dP = a[3];
    w.mdot_s = a[4];
    w.mdot_l = a[5];
    w.phi_a = a[6];
}

} // namespace

ScenarioShape parse_shape(const std::string& name)
{
    if (name == "constant") return ScenarioShape::Constant;
    if (name == "staircase") return ScenarioShape::Staircase;
    if (name == "ramp") return ScenarioShape::Ramp;
    throw ConfigError("unknown scenario shape '" + name + "' (constant, staircase, ramp)");
}

std::string shape_name(ScenarioShape s)
{
    switch (s) {
    case ScenarioShape::Constant: return "constant";
    case ScenarioShape::Staircase: return "staircase";
    case ScenarioShape::Ramp: return "ramp";
    }
    return "unknown";
}

InputEnvelope InputEnvelope::from_gpr(const model::GprSet& gpr)
{
    InputEnvelope e;
    const Eigen::Vector2d lo = gpr.v.input_min().cwiseMax(gpr.D.input_min()).cwiseMax(gpr.zeta.input_min());
    const Eigen::Vector2d hi = gpr.v.input_max().cwiseMin(gpr.D.input_max()).cwiseMin(gpr.zeta.input_max());
    e.mdot_a_min = lo(0);
    e.mdot_a_max = hi(0);
    e.a_vib_min = lo(1);
    e.a_vib_max = hi(1);
    return e;
}

void validate_scenario(const ScenarioSpec& s, const InputEnvelope& env)
{
    const auto fail = [](const std::string& what) { throw ConfigError("scenario: " + what); };
    if (!(s.dt > 0.0) || !(s.duration >= 0.0) || !(s.level_duration > 0.0)) {
        fail("dt and level duration must be positive, duration non-negative");
    }
    const double steps = s.duration / s.dt;
    const double level_steps = s.level_duration / s.dt;
    if (std::abs(steps - std::round(steps)) > 1e-9 || std::abs(level_steps - std::round(level_steps)) > 1e-9) {
        fail("duration and level duration must be multiples of dt");
    }
    const auto nom = pack(s.nominal_u, s.nominal_w);
    const auto amp = pack(s.amplitude_u, s.amplitude_w);
    for (int i = 0; i < kChannels; ++i) {
        if (!(amp[i] >= 0.0) || !std::isfinite(nom[i])) {
            fail("amplitudes must be non-negative and nominal values finite");
        }
    }
    const auto lo = [&](int i) { return nom[i] - amp[i]; };
    const auto hi = [&](int i) { return nom[i] + amp[i]; };
    if (!(lo(1) > 0.0) || !(lo(3) >= 0.0) || !(lo(4) > 0.0) || !(lo(5) >= 0.0) || !(lo(6) >= 0.0) ||
        !(hi(6) <= 1.0)) {
        fail("input ranges leave the physical domain");
    }
    const double tol = 1e-12;
    if (lo(1) < env.mdot_a_min - tol || hi(1) > env.mdot_a_max + tol || lo(2) < env.a_vib_min - tol ||
        hi(2) > env.a_vib_max + tol) {
        std::ostringstream msg;
        msg << "scenario: (mdot_a, a_vib) range [" << lo(1) << ", " << hi(1) << "] x [" << lo(2) << ", " << hi(2)
            << "] leaves the coefficient-map envelope [" << env.mdot_a_min << ", " << env.mdot_a_max << "] x ["
            << env.a_vib_min << ", " << env.a_vib_max << "]";
        throw EnvelopeError(msg.str());
    }
}

model::SignalLog synthesize_signals(const ScenarioSpec& s, const InputEnvelope& env)
{
    validate_scenario(s, env);
    const long steps = std::lround(s.duration / s.dt);
    const long level_steps = std::lround(s.level_duration / s.dt);
    const auto nom = pack(s.nominal_u, s.nominal_w);
    const auto amp = pack(s.amplitude_u, s.amplitude_w);

    std::mt19937_64 rng(s.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const auto draw = [&] {
        std::array<double, kChannels> lv{};
        for (int i = 0; i < kChannels; ++i) {
            lv[i] = nom[i] + amp[i] * unif(rng);
        }
        return lv;
    };

    model::SignalLog log;
    log.samples.resize(static_cast<std::size_t>(steps) + 1);
    log.samples[0].t = 0.0;
    unpack(nom, log.samples[0].u, log.samples[0].w);

    std::array<double, kChannels> from = nom;
    std::array<double, kChannels> to = s.shape == ScenarioShape::Constant ? nom : draw();
    for (long k = 1; k <= steps; ++k) {
        const long level = (k - 1) / level_steps;
        const long within = (k - 1) % level_steps;
        if (within == 0 && level > 0 && s.shape != ScenarioShape::Constant) {
            from = to;
            to = draw();
        }
        std::array<double, kChannels> val = to;
        if (s.shape == ScenarioShape::Ramp) {
            const double f = double(within + 1) / double(level_steps);
            for (int i = 0; i < kChannels; ++i) {
                val[i] = from[i] + f * (to[i] - from[i]);
            }
        }
        model::SignalSample& smp = log.samples[static_cast<std::size_t>(k)];
        smp.t = s.dt * double(k);
        unpack(val, smp.u, smp.w);
    }
    return log;
}

SyntheticRun attach_measurements(model::SignalLog log, const model::BilinearPart& fom,
                                 const model::DryerModel& model, double noise_std, std::uint64_t seed,
                                 const model::SimulationOptions& options)
{
    if (log.empty()) {
        throw ConfigError("attach_measurements: empty log");
    }
    if (fom.order() != model.grid().n) {
        throw DimensionError("attach_measurements: measurements need the full-order model");
    }
    const model::FomState x0 = model::steady_state(model, log.samples[0].u, log.samples[0].w);
    SyntheticRun run;
    run.truth = model::simulate(fom, model, log, {x0.x1, x0.m_h, x0.eps, x0.T_s}, options);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t k = 0; k < log.size(); ++k) {
        const double e = noise_std > 0.0 ? noise_std * noise(rng) : 0.0;
        log.samples[k].y = run.truth.y[k] + e;
    }
    run.log = std::move(log);
    return run;
}

void fit_reduction_window(mor::ReductionSettings& settings, const model::DryerModel& model,
                          const ScenarioSpec& spec)
{
    const auto nom = pack(spec.nominal_u, spec.nominal_w);
    const auto amp = pack(spec.amplitude_u, spec.amplitude_w);
    model::Uhat lo = model::Uhat::Constant(std::numeric_limits<double>::infinity());
    model::Uhat hi = -lo;
    // corners of the 7-dimensional input box plus the centre
    for (int mask = 0; mask <= (1 << kChannels); ++mask) {
        std::array<double, kChannels> p = nom;
        if (mask < (1 << kChannels)) {
            for (int i = 0; i < kChannels; ++i) {
                p[i] += ((mask >> i) & 1) ? amp[i] : -amp[i];
            }
        }
        model::PlantInputs u;
        model::Disturbances w;
        unpack(p, u, w);
        const model::FomState st = model::steady_state(model, u, w);
        const model::Uhat h = model.uhat(st.m_h, st.eps, st.T_s, model.coefficients(u), u, w);
        lo = lo.cwiseMin(h);
        hi = hi.cwiseMax(h);
    }
    settings.operating_point = 0.5 * (lo + hi);
    for (int i = 0; i < 5; ++i) {
        // channels that do not move between steady states (mdot_h / m_h - 1) keep their prior window
        if (hi(i) > lo(i)) {
            settings.deviation(i) = 0.625 * (hi(i) - lo(i));
        }
    }
}

} // namespace vfbd::harness
