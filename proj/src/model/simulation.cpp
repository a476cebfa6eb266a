#include "vfbd/model/simulation.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>
#include <boost/math/tools/toms748_solve.hpp>

#include "vfbd/model/dryer_dae.hpp"
#include "vfbd/numerics/newton.hpp"

namespace vfbd::model {

ModelState advance(const BilinearPart& part, const DryerModel& model, const ModelState& state,
                   const PlantInputs& u, const Disturbances& w, double dt, const SimulationOptions& options)
{
    const DryerDae dae(part, model, u, w);
    const Eigen::Index n = part.order();
    numerics::DaeState s;
    s.y.resize(n + 1);
    s.y.head(n) = state.x;
    s.y(n) = state.m_h;
    s.z = Eigen::Vector2d(state.eps, state.T_s);
    const numerics::DaeState next = numerics::collocation_step(dae, s, dt, options.scheme, options.collocation);
    return {next.y.head(n), next.y(n), next.z(0), next.z(1)};
}

ModelState make_consistent(const DryerModel& model, ModelState state, const PlantInputs& u, const Disturbances& w,
                           double tol)
{
    const Eigen::Vector2d g = model.constraints().residual(state.m_h, state.eps, state.T_s, u, w);
    if (g.lpNorm<Eigen::Infinity>() <= tol) {
        return state;
    }
    const Eigen::Vector2d z =
        solve_algebraic(model.constraints(), state.m_h, u, w, Eigen::Vector2d(state.eps, state.T_s));
    state.eps = z(0);
    state.T_s = z(1);
    return state;
}

Trajectory simulate(const BilinearPart& part, const DryerModel& model, const SignalLog& log, ModelState x0,
                    const SimulationOptions& options)
{
    if (x0.x.size() != part.order()) {
        throw DimensionError("simulate: initial state does not match the model order");
    }
    Trajectory traj;
    if (log.empty()) {
        traj.t.push_back(0.0);
        traj.y.push_back(part.output(x0.x));
        traj.states.push_back(std::move(x0));
        return traj;
    }
    x0 = make_consistent(model, std::move(x0), log.samples[0].u, log.samples[0].w, options.consistency_tol);
    traj.t.reserve(log.size());
    traj.states.reserve(log.size());
    traj.y.reserve(log.size());
    traj.step_seconds.reserve(log.size() - 1);
    traj.t.push_back(log.samples[0].t);
    traj.y.push_back(part.output(x0.x));
    traj.states.push_back(std::move(x0));
    for (std::size_t k = 1; k < log.size(); ++k) {
        const SignalSample& s = log.samples[k];
        const double dt = s.t - log.samples[k - 1].t;
        const auto start = std::chrono::steady_clock::now();
        ModelState next;
        try {
            next = advance(part, model, traj.states.back(), s.u, s.w, dt, options);
        } catch (const NumericalError& e) {
            std::ostringstream msg;
            msg << "simulate: step " << k << " (t = " << s.t << "): " << e.what();
            throw SimulationError(msg.str(), k);
        }
        const auto stop = std::chrono::steady_clock::now();
        traj.step_seconds.push_back(std::chrono::duration<double>(stop - start).count());
        traj.t.push_back(s.t);
        traj.y.push_back(part.output(next.x));
        traj.states.push_back(std::move(next));
    }
    return traj;
}

FomState steady_state(const DryerModel& model, const PlantInputs& u, const Disturbances& w, double m_h_guess)
{
    const Coefficients c = model.coefficients(u);
    // T_s depends on the inputs only; the holdup balance is monotone in m_h once eps(m_h) is eliminated.
    const Eigen::Vector2d z0 = solve_algebraic(model.constraints(), m_h_guess, u, w, default_algebraic_guess(u));
    Eigen::Vector2d z_last = z0;
    const auto balance = [&](double m_h) {
        z_last = solve_algebraic(model.constraints(), m_h, u, w, z_last);
        return model.holdup_rate(m_h, z_last(0), c, w);
    };
    double lo = m_h_guess;
    double hi = m_h_guess;
    double f_lo = balance(lo);
    double f_hi = f_lo;
    for (int k = 0; k < 60 && f_lo < 0.0; ++k) {
        hi = lo;
        f_hi = f_lo;
        lo *= 0.5;
        f_lo = balance(lo);
    }
    for (int k = 0; k < 60 && f_hi > 0.0; ++k) {
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        f_hi = balance(hi);
    }
    if (!(f_lo >= 0.0 && f_hi <= 0.0)) {
        throw ConvergenceError("steady_state: cannot bracket the steady holdup");
    }
    double m_h = lo;
    if (lo != hi) {
        boost::uintmax_t iterations = 200;
        const auto bracket = boost::math::tools::toms748_solve(
            balance, lo, hi, f_lo, f_hi, boost::math::tools::eps_tolerance<double>(52), iterations);
        m_h = 0.5 * (bracket.first + bracket.second);
    }
    const Eigen::Vector2d z = solve_algebraic(model.constraints(), m_h, u, w, z_last);
    const Eigen::Vector3d sol(m_h, z(0), z(1));

    FomState st;
    st.m_h = sol(0);
    st.eps = sol(1);
    st.T_s = sol(2);
    const Uhat uh = model.uhat(st.m_h, st.eps, st.T_s, c, u, w);
    const QTensor& q = model.q();
    const int n = model.grid().n;
    Eigen::SparseMatrix<double> a(n, n);
    a.setIdentity();
    a *= -1.0;
    for (int i = 0; i < 4; ++i) {
        a += uh(i) * q.q[i];
    }
    a.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(a);
    if (lu.info() != Eigen::Success) {
        throw SingularMatrixError("steady_state: moisture operator is singular");
    }
    st.x1 = lu.solve(Eigen::VectorXd(-q.b1 * uh(4)));
    return st;
}

} // namespace vfbd::model
