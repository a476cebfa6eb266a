#include "vfbd/observer/ekf.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "vfbd/errors.hpp"
#include "vfbd/model/simulation.hpp"
#include "vfbd/numerics/newton.hpp"
#include "vfbd/observer/covariance.hpp"
#include "vfbd/observer/jacobians.hpp"

namespace vfbd::observer {

namespace {

void symmetrize(Eigen::MatrixXd& p)
{
    p = 0.5 * (p + p.transpose()).eval();
}

} // namespace

ReconcileResult reconcile_algebraic(const model::ConstraintModel& g, double m_h, const Eigen::Vector2d& z0,
                                    const model::PlantInputs& u, const model::Disturbances& w,
                                    const ObserverConfig& cfg)
{
    ReconcileResult res;
    res.z = z0;
    if (!(m_h > 0.0)) {
        return res;
    }
    numerics::NewtonSettings ns;
    ns.abs_tol = cfg.reconcile_tol;
    ns.step_tol = 1e-10;
    ns.max_iterations = cfg.reconcile_max_iterations;
    const auto residual = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
        return g.residual(m_h, z(0), z(1), u, w);
    };
    const auto jac = [&](const Eigen::VectorXd& z) -> Eigen::MatrixXd {
        return g.jacobian(m_h, z(0), z(1), u, w).rightCols<2>();
    };
    try {
        const numerics::NewtonReport rep = numerics::newton_solve(residual, jac, Eigen::VectorXd(z0), ns);
        res.z = rep.solution;
        res.iterations = rep.iterations;
        res.residual = rep.residual_norm;
        res.ok = true;
    } catch (const NumericalError&) {
        return res;
    }
    res.z(0) = std::clamp(res.z(0), cfg.bounds.eps_min, cfg.bounds.eps_max);
    return res;
}

Eigen::VectorXd plausibility_project(Eigen::VectorXd x, const PlausibilityBounds& b)
{
    if (x.size() < 3) {
        throw DimensionError("plausibility_project: state too short");
    }
    const Eigen::Index n = x.size() - 3;
    x.head(n) = x.head(n).cwiseMax(b.x1_min);
    x(n) = std::max(x(n), b.m_h_floor);
    x(n + 1) = std::clamp(x(n + 1), b.eps_min, b.eps_max);
    return x;
}

EkfState ekf_step(const EkfState& state, double y_meas, const model::PlantInputs& u, const model::Disturbances& w,
                  const ObserverConfig& cfg, const model::BilinearPart& part, const mor::RomBasis& basis,
                  const model::DryerModel& model)
{
    const Eigen::Index n = basis.full_order();
    const Eigen::Index r = basis.reduced_order();
    const Eigen::Index m = r + 1;
    const bool full = state.P.size() > 0;
    const bool conform = full ? (state.P.rows() == n + 3 && state.P.cols() == n + 3)
                              : (state.P_hat.rows() == r + 3 && state.P_hat.cols() == r + 3);
    if (state.x.size() != n + 3 || !conform || part.order() != r) {
        throw DimensionError("ekf_step: state, basis and prediction model do not conform");
    }
    if (!std::isfinite(y_meas)) {
        throw DomainError("ekf_step: measurement is not finite");
    }

    // 1-2: project
    Eigen::VectorXd xh = project_estimate(basis, state.x);
    Eigen::MatrixXd ph = full ? project_covariance(basis, state.P) : state.P_hat;

    // 3: nonlinear prediction
    const model::ModelState start{xh.head(r), xh(r), xh(r + 1), xh(r + 2)};
    const model::ModelState pred = model::advance(part, model, start, u, w, cfg.dt, cfg.prediction);
    xh.head(r) = pred.x;
    xh(r) = pred.m_h;
    xh(r + 1) = pred.eps;
    xh(r + 2) = pred.T_s;

    // 4-7: linearize and propagate
    const JacobianSet j = assemble_jacobians(xh.head(m), xh.tail(2), u, w, part, model, cfg.j4_condition_limit);
    const Eigen::VectorXd omega = cfg.omega_for(n);
    if (cfg.variant == 2) {
        const Eigen::MatrixXd phi = transition_matrix(build_al2(j, cfg.j4_condition_limit), cfg.dt, cfg.expm_cap);
        const Eigen::MatrixXd om = noise_matrix(omega, basis, j, cfg.negate_psi, cfg.j4_condition_limit);
        ph = phi * ph * phi.transpose() + om;
    } else {
        const Eigen::MatrixXd phi = transition_matrix(build_al1(j, cfg.j4_condition_limit), cfg.dt, cfg.expm_cap);
        const Eigen::MatrixXd om = differential_noise(omega, basis);
        ph.topLeftCorner(m, m) = phi * ph.topLeftCorner(m, m) * phi.transpose() + om;
        ph.topRightCorner(m, 2) = phi * ph.topRightCorner(m, 2);
        ph.bottomLeftCorner(2, m) = ph.topRightCorner(m, 2).transpose();
    }
    symmetrize(ph);

    // 8-10: measurement update
    EkfState out;
    out.k = state.k + 1;
    Eigen::RowVectorXd c = Eigen::RowVectorXd::Zero(r + 3);
    c.head(r) = part.output_row();
    out.innovation = y_meas - c.dot(xh);
    const Eigen::Index upd = cfg.variant == 2 ? r + 3 : m;
    const Eigen::VectorXd pc = ph.topLeftCorner(upd, upd) * c.head(upd).transpose();
    const double s = c.head(upd).dot(pc) + cfg.nu;
    out.innovation_variance = s;
    if (s > 0.0 && std::isfinite(s) && pc.allFinite()) {
        Eigen::VectorXd k = Eigen::VectorXd::Zero(r + 3);
        k.head(upd) = pc / s;
        xh += k * out.innovation;
        ph -= k * (c * ph);
        symmetrize(ph);
    } else {
        out.flags.gain_fallback = true;
    }

    // 11: reconcile algebraic states (variant 2 before lifting)
    const double m_h_rec = std::max(xh(r), cfg.bounds.m_h_floor);
    if (cfg.variant == 2) {
        const ReconcileResult rec =
            reconcile_algebraic(model.constraints(), m_h_rec, xh.tail(2), u, w, cfg);
        out.flags.reconcile_failed = !rec.ok;
        xh.tail(2) = rec.z;
    }

    // 12-13: lift
    out.x = lift_estimate(basis, xh);
    if (cfg.materialize_covariance) {
        out.P = lift_covariance(basis, ph);
        symmetrize(out.P);
        if (asymmetry(out.P) > 1e-9) {
            throw NumericalError("ekf_step: covariance lost symmetry");
        }
    }
    out.P_hat = std::move(ph);
    if (cfg.variant == 1) {
        const ReconcileResult rec =
            reconcile_algebraic(model.constraints(), m_h_rec, out.x.tail(2), u, w, cfg);
        out.flags.reconcile_failed = !rec.ok;
        out.x.tail(2) = rec.z;
    }
    out.x = plausibility_project(std::move(out.x), cfg.bounds);
    return out;
}

Eigen::MatrixXd full_covariance(const EkfState& state, const mor::RomBasis& basis)
{
    if (state.P.size() > 0) {
        return state.P;
    }
    Eigen::MatrixXd p = lift_covariance(basis, state.P_hat);
    symmetrize(p);
    return p;
}

double covariance_trace(const EkfState& state)
{
    return state.P.size() > 0 ? state.P.trace() : state.P_hat.trace();
}

ObserverRun run_observer(const model::SignalLog& log, EkfState state, const ObserverConfig& cfg,
                         const model::BilinearPart& part, const mor::RomBasis& basis,
                         const model::DryerModel& model)
{
    ObserverRun run;
    if (log.empty()) {
        return run;
    }
    const Eigen::Index n = state.grid_size();
    const auto row_of = [&](double t, const EkfState& s, long ns) {
        ObserverLogRow row;
        row.t = t;
        row.y_hat = s.x(n - 1);
        row.m_h = s.m_h();
        row.eps = s.eps();
        row.T_s = s.T_s();
        row.innovation = s.innovation;
        row.trace_p = covariance_trace(s);
        row.step_ns = ns;
        row.flags = s.flags;
        return row;
    };
    run.estimates.reserve(log.size());
    run.rows.reserve(log.size());
    run.estimates.push_back(state.x);
    run.rows.push_back(row_of(log.samples[0].t, state, 0));
    for (std::size_t k = 1; k < log.size(); ++k) {
        const model::SignalSample& smp = log.samples[k];
        const double dt = smp.t - log.samples[k - 1].t;
        if (std::abs(dt - cfg.dt) > 1e-9 * std::max(1.0, cfg.dt)) {
            std::ostringstream msg;
            msg << "observer: log spacing " << dt << " at row " << k << " differs from dt = " << cfg.dt;
            throw ConfigError(msg.str());
        }
        const auto t0 = std::chrono::steady_clock::now();
        try {
            state = ekf_step(state, smp.y, smp.u, smp.w, cfg, part, basis, model);
        } catch (const NumericalError& e) {
            std::ostringstream msg;
            msg << "step " << k << " (t = " << smp.t << "): " << e.what();
            run.failed = true;
            run.failure = msg.str();
            return run;
        }
        const auto t1 = std::chrono::steady_clock::now();
        const long ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
        run.estimates.push_back(state.x);
        run.rows.push_back(row_of(smp.t, state, ns));
    }
    return run;
}

void write_observer_log(const std::string& path, const std::vector<ObserverLogRow>& rows)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write observer log: " + path);
    }
    out << "t,y_hat,m_h,eps,T_s,innovation,trace_P,step_ns,reconcile_failed,gain_fallback\n";
    out << std::setprecision(17);
    for (const auto& r : rows) {
        out << r.t << ',' << r.y_hat << ',' << r.m_h << ',' << r.eps << ',' << r.T_s << ',' << r.innovation << ','
            << r.trace_p << ',' << r.step_ns << ',' << int(r.flags.reconcile_failed) << ','
            << int(r.flags.gain_fallback) << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

} // namespace vfbd::observer
