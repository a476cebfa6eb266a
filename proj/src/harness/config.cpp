#include "vfbd/harness/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace vfbd::mor {

void to_json(nlohmann::json& j, TestBasis b)
{
    j = b == TestBasis::Galerkin ? "galerkin" : "petrov_galerkin";
}

void from_json(const nlohmann::json& j, TestBasis& b)
{
    const auto s = j.get<std::string>();
    if (s == "galerkin") {
        b = TestBasis::Galerkin;
    } else if (s == "petrov_galerkin") {
        b = TestBasis::PetrovGalerkin;
    } else {
        throw ConfigError("unknown projection '" + s + "' (galerkin, petrov_galerkin)");
    }
}

} // namespace vfbd::mor

namespace vfbd::harness {

void to_json(nlohmann::json& j, ScenarioShape s)
{
    j = shape_name(s);
}

void from_json(const nlohmann::json& j, ScenarioShape& s)
{
    s = parse_shape(j.get<std::string>());
}

} // namespace vfbd::harness

namespace nlohmann {

template <int Rows>
struct adl_serializer<Eigen::Matrix<double, Rows, 1>> {
    static void to_json(json& j, const Eigen::Matrix<double, Rows, 1>& v)
    {
        j = std::vector<double>(v.data(), v.data() + v.size());
    }
    static void from_json(const json& j, Eigen::Matrix<double, Rows, 1>& v)
    {
        const auto s = j.get<std::vector<double>>();
        if (Rows != Eigen::Dynamic && Eigen::Index(s.size()) != Rows) {
            throw std::invalid_argument("expected " + std::to_string(Rows) + " entries");
        }
        v = Eigen::Map<const Eigen::VectorXd>(s.data(), Eigen::Index(s.size()));
    }
};

} // namespace nlohmann

namespace vfbd::harness {

using nlohmann::json;

namespace {

template <class F>
void visit(AppConfig& c, F&& f)
{
    f("grid.n", c.grid_n);
    f("grid.length", c.length);

    auto& p = c.params;
    f("params.k_d1", p.k_d1);
    f("params.rho_s", p.rho_s);
    f("params.rho_a", p.rho_a);
    f("params.mu_a", p.mu_a);
    f("params.d_p", p.d_p);
    f("params.A_bed", p.A_bed);
    f("params.c_pa", p.c_pa);
    f("params.dh_v", p.dh_v);
    f("params.P_a", p.P_a);
    f("params.g", p.g);
    f("params.lambda_phi", p.lambda_phi);

    f("gpr.training", c.gpr_training);
    f("gpr.points_per_axis", c.gpr_points_per_axis);

    auto& s = c.scenario;
    f("scenario.shape", s.shape);
    f("scenario.duration", s.duration);
    f("scenario.dt", s.dt);
    f("scenario.level_duration", s.level_duration);
    f("scenario.seed", s.seed);
    for (auto [prefix, u, w] : {std::tuple{"scenario.nominal.", &s.nominal_u, &s.nominal_w},
                                std::tuple{"scenario.amplitude.", &s.amplitude_u, &s.amplitude_w}}) {
        const std::string pre = prefix;
        f(pre + "T_a", u->T_a);
        f(pre + "mdot_a", u->mdot_a);
        f(pre + "a_vib", u->a_vib);
        f(pre + "dP", u->dP);
        f(pre + "mdot_s", w->mdot_s);
        f(pre + "mdot_l", w->mdot_l);
        f(pre + "phi_a", w->phi_a);
    }
    f("measurement.noise_std", c.noise_std);
    f("measurement.seed", c.noise_seed);

    auto& r = c.reduce;
    f("reduce.order", r.order);
    f("reduce.max_iterations", r.max_iterations);
    f("reduce.eigen_tol", r.eigen_tol);
    f("reduce.contraction", r.contraction);
    f("reduce.final_projection", r.final_projection);
    f("reduce.fit_window", c.fit_window);
    f("reduce.operating_point", r.operating_point);
    f("reduce.deviation", r.deviation);
    f("reduce.validation_signals", r.validation_signals);
    f("reduce.validation_steps", r.validation_steps);
    f("reduce.level_steps", r.level_steps);
    f("reduce.seed", r.seed);

    auto& o = c.observer;
    f("observer.variant", o.variant);
    f("observer.dt", o.dt);
    f("observer.nu", o.nu);
    f("observer.omega", o.omega);
    f("observer.omega_default", o.omega_default);
    f("observer.p0_moisture", o.p0_moisture);
    f("observer.p0_holdup", o.p0_holdup);
    f("observer.p0_algebraic", o.p0_algebraic);
    f("observer.negate_psi", o.negate_psi);
    f("observer.j4_condition_limit", o.j4_condition_limit);
    f("observer.expm_cap", o.expm_cap);
    f("observer.reconcile_tol", o.reconcile_tol);
    f("observer.reconcile_max_iterations", o.reconcile_max_iterations);
    f("observer.materialize_covariance", o.materialize_covariance);
    f("observer.bounds.m_h_floor", o.bounds.m_h_floor);
    f("observer.bounds.eps_min", o.bounds.eps_min);
    f("observer.bounds.eps_max", o.bounds.eps_max);
    f("observer.bounds.x1_min", o.bounds.x1_min);
    f("observer.init_m_h_factor", c.init_m_h_factor);

    auto& m = c.montecarlo;
    f("montecarlo.runs", m.runs);
    f("montecarlo.duration", m.duration);
    f("montecarlo.seed", m.seed);
    f("montecarlo.x1_offset", m.x1_offset);
    f("montecarlo.x1_tilt", m.x1_tilt);
    f("montecarlo.m_h_range", m.m_h_range);
    f("montecarlo.eps_min", m.eps_min);
    f("montecarlo.eps_max", m.eps_max);
    f("montecarlo.T_s_range", m.T_s_range);
    f("montecarlo.p0_scale_min", m.p0_scale_min);
    f("montecarlo.p0_scale_max", m.p0_scale_max);
    f("montecarlo.noise_std", m.noise_std);
    f("montecarlo.final_samples", m.final_samples);
    f("montecarlo.state_tol", m.state_tol);
    f("montecarlo.algebraic_tol", m.algebraic_tol);
    f("montecarlo.threads", m.threads);
    f("montecarlo.observers", c.mc_observers);

    auto& b = c.bench;
    f("bench.grid_sizes", b.grid_sizes);
    f("bench.warmup", b.warmup);
    f("bench.samples", b.samples);
    f("bench.init_m_h_factor", b.init_m_h_factor);
    f("bench.noisy_ratio", b.noisy_ratio);

    f("io.signal_log", c.signal_log);
    f("io.rom", c.rom_file);
}

json::json_pointer pointer(const std::string& dotted)
{
    std::string p = "/" + dotted;
    for (auto& ch : p) {
        if (ch == '.') {
            ch = '/';
        }
    }
    return json::json_pointer(p);
}

std::string dotted(const std::string& ptr)
{
    std::string d = ptr.substr(ptr.empty() ? 0 : 1);
    for (auto& ch : d) {
        if (ch == '/') {
            ch = '.';
        }
    }
    return d;
}

json to_tree(const AppConfig& cfg)
{
    json j = json::object();
    AppConfig copy = cfg;
    visit(copy, [&](const std::string& key, auto& ref) { j[pointer(key)] = ref; });
    return j;
}

void check_keys(const json& node, const std::string& ptr, const std::set<std::string>& leaves,
                const std::set<std::string>& inner)
{
    if (leaves.count(ptr)) {
        return;
    }
    if (!ptr.empty() && !inner.count(ptr)) {
        throw ConfigError("config: unknown key '" + dotted(ptr) + "'");
    }
    if (!node.is_object()) {
        throw ConfigError("config: '" + dotted(ptr) + "' must be an object");
    }
    for (auto it = node.begin(); it != node.end(); ++it) {
        check_keys(it.value(), ptr + "/" + it.key(), leaves, inner);
    }
}

void from_tree(AppConfig& cfg, const json& j)
{
    std::set<std::string> leaves;
    std::set<std::string> inner;
    for (const auto& k : config_keys()) {
        const std::string p = pointer(k).to_string();
        leaves.insert(p);
        for (auto pos = p.find('/', 1); pos != std::string::npos; pos = p.find('/', pos + 1)) {
            inner.insert(p.substr(0, pos));
        }
    }
    check_keys(j, "", leaves, inner);

    visit(cfg, [&](const std::string& key, auto& ref) {
        const auto ptr = pointer(key);
        if (!j.contains(ptr)) {
            return;
        }
        try {
            using T = std::decay_t<decltype(ref)>;
            if constexpr (std::is_same_v<T, std::uint64_t>) {
                const auto& v = j.at(ptr);
                if (!v.is_number_unsigned()) {
                    throw std::invalid_argument("expected a non-negative integer");
                }
                ref = v.template get<std::uint64_t>();
            } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
                const auto& v = j.at(ptr);
                if (!v.is_number_integer()) {
                    throw std::invalid_argument("expected an integer");
                }
                ref = v.template get<T>();
            } else if constexpr (std::is_floating_point_v<T>) {
                const auto& v = j.at(ptr);
                if (!v.is_number()) {
                    throw std::invalid_argument("expected a number");
                }
                ref = v.template get<T>();
            } else {
                ref = j.at(ptr).template get<T>();
            }
        } catch (const ConfigError& e) {
            throw ConfigError("config: key '" + key + "': " + e.what());
        } catch (const std::exception& e) {
            throw ConfigError("config: key '" + key + "': " + e.what());
        }
    });
}

} // namespace

std::vector<std::string> config_keys()
{
    std::vector<std::string> keys;
    AppConfig c;
    visit(c, [&](const std::string& key, auto&) { keys.push_back(key); });
    return keys;
}

void AppConfig::validate() const
{
    if (grid_n < 2 || !(length > 0.0)) {
        throw ConfigError("config: grid.n must be >= 2 and grid.length positive");
    }
    try {
        params.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: params: ") + e.what());
    }
    if (gpr_points_per_axis < 2) {
        throw ConfigError("config: gpr.points_per_axis must be >= 2");
    }
    if (!(noise_std >= 0.0)) {
        throw ConfigError("config: measurement.noise_std must be >= 0");
    }
    if (reduce.order < 1 || reduce.order > grid_n) {
        throw ConfigError("config: reduce.order must lie in [1, grid.n]");
    }
    if (reduce.max_iterations < 1 || !(reduce.eigen_tol > 0.0) || !(reduce.contraction > 0.0)) {
        throw ConfigError("config: reduce.max_iterations, eigen_tol and contraction must be positive");
    }
    if ((reduce.deviation.array() < 0.0).any()) {
        throw ConfigError("config: reduce.deviation must be non-negative");
    }
    observer.validate(grid_n);
    if (std::abs(observer.dt - scenario.dt) > 1e-12 * std::max(1.0, scenario.dt)) {
        throw ConfigError("config: observer.dt must equal scenario.dt");
    }
    if (!(init_m_h_factor > 0.0)) {
        throw ConfigError("config: observer.init_m_h_factor must be positive");
    }
    montecarlo.validate();
    if (mc_observers.empty()) {
        throw ConfigError("config: montecarlo.observers is empty");
    }
    for (const auto& name : mc_observers) {
        if (name != "ekf1" && name != "ekf2" && name != "ekf_fom") {
            throw ConfigError("config: unknown observer '" + name + "' (ekf1, ekf2, ekf_fom)");
        }
    }
    bench.validate();
}

AppConfig load_config(const std::string& path, const std::vector<std::string>& overrides)
{
    json tree = to_tree(AppConfig{});
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) {
            throw IoError("cannot open config " + path);
        }
        json file;
        try {
            file = json::parse(in, nullptr, true, true);
        } catch (const json::exception& e) {
            throw ConfigError("config: " + path + ": " + e.what());
        }
        if (!file.is_object()) {
            throw ConfigError("config: " + path + ": top level must be an object");
        }
        AppConfig probe;
        from_tree(probe, file);   // key and type check against the file alone
        tree.merge_patch(file);
    }
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("config: override '" + ov + "' is not key=value");
        }
        const std::string key = ov.substr(0, eq);
        const std::string text = ov.substr(eq + 1);
        json value = json::parse(text, nullptr, false);
        if (value.is_discarded()) {
            value = text;
        }
        json patch = json::object();
        try {
            patch[pointer(key)] = value;
        } catch (const json::exception& e) {
            throw ConfigError("config: override key '" + key + "': " + e.what());
        }
        AppConfig probe;
        from_tree(probe, patch);
        tree[pointer(key)] = value;
    }
    AppConfig cfg;
    from_tree(cfg, tree);
    cfg.validate();
    return cfg;
}

std::string config_to_json(const AppConfig& cfg)
{
    return to_tree(cfg).dump(2) + "\n";
}

} // namespace vfbd::harness
