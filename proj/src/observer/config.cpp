#include "vfbd/observer/config.hpp"

#include <cmath>
#include <sstream>

#include "vfbd/errors.hpp"

namespace vfbd::observer {

void ObserverConfig::validate(Eigen::Index n) const
{
    const auto fail = [](const std::string& what) { throw ConfigError("observer: " + what); };
    if (variant != 1 && variant != 2) {
        fail("variant must be 1 or 2");
    }
    if (!(dt > 0.0)) {
        fail("dt must be positive");
    }
    if (!(nu > 0.0) || !std::isfinite(nu)) {
        fail("measurement noise variance must be positive");
    }
    if (omega.size() != 0 && omega.size() != n + 1) {
        std::ostringstream msg;
        msg << "omega has " << omega.size() << " entries, expected " << n + 1;
        fail(msg.str());
    }
    if ((omega.size() != 0 && !(omega.array() >= 0.0).all()) || !(omega_default >= 0.0)) {
        fail("omega entries must be non-negative");
    }
    if (!(p0_moisture >= 0.0) || !(p0_holdup >= 0.0) || !(p0_algebraic >= 0.0)) {
        fail("initial covariance entries must be non-negative");
    }
    if (!(bounds.m_h_floor > 0.0) || !(bounds.eps_min < bounds.eps_max)) {
        fail("plausibility bounds are inconsistent");
    }
    if (!(reconcile_tol > 0.0) || reconcile_max_iterations < 1) {
        fail("reconciliation settings must be positive");
    }
}

Eigen::VectorXd ObserverConfig::omega_for(Eigen::Index n) const
{
    if (omega.size() == n + 1) {
        return omega;
    }
    return Eigen::VectorXd::Constant(n + 1, omega_default);
}

Eigen::MatrixXd initial_covariance(Eigen::Index n, const ObserverConfig& cfg, double scale)
{
    Eigen::VectorXd d(n + 3);
    d.head(n).setConstant(cfg.p0_moisture);
    d(n) = cfg.p0_holdup;
    d(n + 1) = cfg.p0_algebraic;
    d(n + 2) = cfg.p0_algebraic;
    return (scale * d).asDiagonal();
}

Eigen::VectorXd stack_state(const model::FomState& s)
{
    const Eigen::Index n = s.x1.size();
    Eigen::VectorXd x(n + 3);
    x.head(n) = s.x1;
    x(n) = s.m_h;
    x(n + 1) = s.eps;
    x(n + 2) = s.T_s;
    return x;
}

model::FomState unstack_state(const Eigen::VectorXd& x)
{
    if (x.size() < 4) {
        throw DimensionError("unstack_state: state too short");
    }
    const Eigen::Index n = x.size() - 3;
    return {x.head(n), x(n), x(n + 1), x(n + 2)};
}

EkfState make_ekf_state(const model::FomState& x0, const ObserverConfig& cfg, double p0_scale)
{
    EkfState s;
    s.x = stack_state(x0);
    s.P = initial_covariance(x0.x1.size(), cfg, p0_scale);
    return s;
}

} // namespace vfbd::observer
