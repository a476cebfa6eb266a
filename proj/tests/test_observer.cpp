#include <doctest.h>

#include <cmath>
#include <random>

#include "vfbd/harness/scenario.hpp"
#include "vfbd/model/simulation.hpp"
#include "vfbd/mor/bilinear.hpp"
#include "vfbd/mor/reduce.hpp"
#include "vfbd/numerics/expm.hpp"
#include "vfbd/numerics/orthonormalize.hpp"
#include "vfbd/observer/covariance.hpp"
#include "vfbd/observer/ekf.hpp"
#include "vfbd/observer/jacobians.hpp"
#include "closures.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace vfbd;
using namespace vfbd::observer;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Rig {
    model::DryerModel model;
    mor::BilinearSystem fom;
    mor::ReductionResult red;

    Rig(int n, int r) : model(support::default_model(n)), fom(mor::build_bilinear_fom(model.q(), model.grid()))
    {
        mor::ReductionSettings s;
        s.order = r;
        red = mor::reduce_h2(fom, s);
    }
};

double rel_block_error(const MatrixXd& a, const MatrixXd& b)
{
    const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-12);
    return (a - b).cwiseAbs().maxCoeff() / scale;
}

double induced_inf(const MatrixXd& a)
{
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

JacobianSet random_set(int m, std::mt19937_64& rng)
{
    JacobianSet j;
    j.J1 = oracle::random_matrix(m, m, rng);
    j.J2 = oracle::random_matrix(m, 2, rng);
    j.J3 = oracle::random_matrix(2, m, rng);
    j.J4 = oracle::random_matrix(2, 2, rng) + 3.0 * MatrixXd::Identity(2, 2);
    return j;
}

model::SignalLog short_log(double duration, std::uint64_t seed, const model::DryerModel& m)
{
    harness::ScenarioSpec sc;
    sc.duration = duration;
    sc.level_duration = 40.0;
    sc.seed = seed;
    return harness::synthesize_signals(sc, harness::InputEnvelope::from_gpr(m.gpr()));
}

} // namespace

TEST_CASE("jacobian blocks match central differences of f and g")
{
    const Rig rig(40, 7);
    const auto& m = rig.model;
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ud(-1.0, 1.0);
    for (int trial = 0; trial < 3; ++trial) {
        model::PlantInputs u;
        u.T_a += 5.0 * ud(rng);
        u.mdot_a += 0.004 * ud(rng);
        u.dP += 10.0 * ud(rng);
        model::Disturbances w;
        w.mdot_l += 2e-4 * ud(rng);
        const model::FomState st = model::steady_state(m, u, w);
        VectorXd x1 = st.x1;
        for (Eigen::Index i = 0; i < x1.size(); ++i) x1(i) *= 1.0 + 0.2 * ud(rng);
        const double m_h = st.m_h * (1.0 + 0.1 * ud(rng));
        const Eigen::Vector2d z = model::solve_algebraic(m.constraints(), m_h, u, w, {st.eps, st.T_s});

        for (const model::BilinearPart* part : {static_cast<const model::BilinearPart*>(&rig.red.rom),
                                                static_cast<const model::BilinearPart*>(&rig.fom)}) {
            const Eigen::Index r = part->order();
            const VectorXd xr = r == 40 ? x1 : rig.red.basis.project(x1);
            VectorXd v(r + 3);
            v << xr, m_h, z;
            VectorXd eta = v.head(r + 1);
            const JacobianSet j = assemble_jacobians(eta, z, u, w, *part, m);
            const auto f = [&](const VectorXd& p) -> VectorXd {
                const model::Uhat uh = model::eval_vector_field(p(r), p(r + 1), p(r + 2), u, w, m);
                VectorXd out(r + 1);
                out.head(r) = part->rhs(p.head(r), uh);
                out(r) = m.holdup_rate(p(r), p(r + 1), m.coefficients(u), w);
                return out;
            };
            const auto g = [&](const VectorXd& p) -> VectorXd {
                return m.constraints().residual(p(r), p(r + 1), p(r + 2), u, w);
            };
            for (double h : {1e-5, 1e-6}) {
                const MatrixXd jf = oracle::central_jacobian(f, v, h);
                const MatrixXd jg = oracle::central_jacobian(g, v, h);
                CHECK(rel_block_error(j.J1, jf.leftCols(r + 1)) <= 1e-5);
                CHECK(rel_block_error(j.J2, jf.rightCols(2)) <= 1e-5);
                CHECK(rel_block_error(j.J3, jg.leftCols(r + 1)) <= 1e-5);
                CHECK(rel_block_error(j.J4, jg.rightCols(2)) <= 1e-5);
            }
            // g sees the moisture states only through the holdup
            CHECK(j.J3.leftCols(r).norm() == 0.0);
        }
    }
}

TEST_CASE("frozen uhat gives the bilinear state block exactly")
{
    const Rig rig(30, 7);
    const model::FomState st = model::steady_state(rig.model, {}, {});
    VectorXd eta(8);
    eta << rig.red.basis.project(st.x1), st.m_h;
    const JacobianSet j = assemble_jacobians(eta, {st.eps, st.T_s}, {}, {}, rig.red.rom, rig.model);
    const model::Uhat uh = model::eval_vector_field(st.m_h, st.eps, st.T_s, {}, {}, rig.model);
    MatrixXd ref = rig.red.rom.Ar;
    for (int i = 0; i < 5; ++i) ref += uh(i) * rig.red.rom.Qr[std::size_t(i)];
    CHECK((j.J1.topLeftCorner(7, 7) - ref).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("singular J4 is rejected")
{
    JacobianSet j;
    j.J1 = MatrixXd::Identity(2, 2);
    j.J2 = MatrixXd::Zero(2, 2);
    j.J3 = MatrixXd::Zero(2, 2);
    j.J4 = (MatrixXd(2, 2) << 1.0, 2.0, 2.0, 4.0).finished();
    CHECK_THROWS_AS(build_al1(j), SingularMatrixError);
    CHECK_THROWS_AS(build_al2(j), SingularMatrixError);
    j.J4 = (MatrixXd(2, 2) << 1.0, 0.0, 0.0, 1e-14).finished();
    CHECK_THROWS_AS(j.j4_solve(MatrixXd::Identity(2, 2)), SingularMatrixError);
    CHECK_NOTHROW(j.j4_solve(MatrixXd::Identity(2, 2), 1e15));
}

TEST_CASE("variant 1 Schur complement")
{
    std::mt19937_64 rng(4);
    JacobianSet j = random_set(3, rng);
    j.J2.setZero();
    CHECK((build_al1(j) - j.J1).norm() == 0.0);
    j.J2 = oracle::random_matrix(3, 2, rng);
    j.J3.setZero();
    CHECK((build_al1(j) - j.J1).norm() == 0.0);

    // hand case with J4 = 2 I
    j.J1 = MatrixXd::Identity(3, 3);
    j.J2 = (MatrixXd(3, 2) << 1, 0, 0, 1, 1, 1).finished();
    j.J3 = (MatrixXd(2, 3) << 2, 0, 0, 0, 2, 0).finished();
    j.J4 = 2.0 * MatrixXd::Identity(2, 2);
    const MatrixXd hand = (MatrixXd(3, 3) << 0, 0, 0, 0, 0, 0, -1, -1, 1).finished();
    CHECK((build_al1(j) - hand).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("variant 2 augmented matrix")
{
    JacobianSet j;
    j.J1 = (MatrixXd(2, 2) << 1, 2, 3, 4).finished();
    j.J2 = MatrixXd::Identity(2, 2);
    j.J3 = MatrixXd::Identity(2, 2);
    j.J4 = (MatrixXd(2, 2) << 2, 0, 0, 4).finished();
    const MatrixXd hand = (MatrixXd(4, 4) << 1, 2, 1, 0,
                                             3, 4, 0, 1,
                                             -0.5, -1, -0.5, 0,
                                             -0.75, -1, 0, -0.25).finished();
    CHECK((build_al2(j) - hand).cwiseAbs().maxCoeff() <= 1e-15);

    std::mt19937_64 rng(5);
    JacobianSet rj = random_set(6, rng);
    const MatrixXd a = build_al2(rj);
    // the linearized flow keeps d/dt g = J3 eta' + J4 z' at zero
    MatrixXd dg = rj.J3 * a.topRows(6) + rj.J4 * a.bottomRows(2);
    CHECK(dg.cwiseAbs().maxCoeff() <= 1e-10);

    rj.J3.setZero();
    const MatrixXd a0 = build_al2(rj);
    CHECK(a0.bottomRows(2).norm() == 0.0);
    const MatrixXd phi = transition_matrix(a0, 2.0);
    CHECK((phi.bottomRows(2) - MatrixXd::Identity(8, 8).bottomRows(2)).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("transition matrix")
{
    CHECK((transition_matrix(MatrixXd::Zero(5, 5), 2.0) - MatrixXd::Identity(5, 5)).norm() == 0.0);
    std::mt19937_64 rng(6);
    const MatrixXd a = oracle::random_matrix(6, 6, rng);
    for (double dt : {1e-3, 1e-6}) {
        const MatrixXd phi = transition_matrix(a, dt);
        const double nrm = dt * induced_inf(a);
        CHECK(induced_inf(phi - MatrixXd::Identity(6, 6)) <= nrm * std::exp(nrm) * (1.0 + 1e-12));
    }
    const MatrixXd phi = transition_matrix(a, 0.3);
    CHECK((phi - oracle::taylor_expm(0.3 * a, 30)).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK_THROWS_AS(transition_matrix(MatrixXd::Zero(10, 10), 1.0, 8), numerics::DimensionCapError);
}

TEST_CASE("noise matrix")
{
    std::mt19937_64 rng(7);
    const int n = 12;
    const int r = 4;
    const MatrixXd v = numerics::orthonormalize(oracle::random_matrix(n, r, rng));
    const mor::RomBasis orth = mor::RomBasis::from_bases(v, v);
    JacobianSet j = random_set(r + 1, rng);

    CHECK(noise_matrix(VectorXd::Zero(n + 1), orth, j).norm() == 0.0);

    j.J3.setZero();
    const MatrixXd om = noise_matrix(VectorXd::Ones(n + 1), orth, j);
    CHECK((om.topLeftCorner(r + 1, r + 1) - MatrixXd::Identity(r + 1, r + 1)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(om.bottomRows(2).norm() == 0.0);
    CHECK(om.rightCols(2).norm() == 0.0);

    // dense triple product with a Petrov-Galerkin pair
    j = random_set(r + 1, rng);
    const mor::RomBasis pg = mor::RomBasis::from_bases(v, numerics::orthonormalize(
                                                              v + 0.3 * oracle::random_matrix(n, r, rng)));
    for (bool uniform : {false, true}) {
        VectorXd omega = uniform ? VectorXd::Constant(n + 1, 0.7) : VectorXd(oracle::random_matrix(n + 1, 1, rng).cwiseAbs());
        if (uniform) omega(n) = 0.2;
        for (bool neg : {false, true}) {
            MatrixXd tt = MatrixXd::Zero(r + 1, n + 1);
            tt.topLeftCorner(r, n) = pg.T;
            tt(r, n) = 1.0;
            MatrixXd vt = MatrixXd::Zero(n + 1, r + 1);
            vt.topLeftCorner(n, r) = pg.V;
            vt(n, r) = 1.0;
            MatrixXd psi(r + 3, r + 1);
            psi.topRows(r + 1).setIdentity();
            psi.bottomRows(2) = j.J4.inverse() * j.J3 * (neg ? -1.0 : 1.0);
            const MatrixXd ref = psi * (tt * omega.asDiagonal() * vt) * psi.transpose();
            CHECK((noise_matrix(omega, pg, j, neg) - ref).cwiseAbs().maxCoeff() <= 1e-12);
        }
    }
    CHECK_THROWS_AS(noise_matrix(VectorXd::Ones(n), orth, j), DimensionError);
}

TEST_CASE("projection pair")
{
    const Rig rig(50, 7);
    const ProjectionPair g = ProjectionPair::from_basis(rig.red.basis);
    CHECK(g.Gamma.rows() == 10);
    CHECK(g.Gamma.cols() == 53);
    CHECK((g.Gamma * g.GammaInv - MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((g.Gamma.topLeftCorner(7, 50) - rig.red.basis.T).norm() == 0.0);
    CHECK((g.GammaInv.topLeftCorner(50, 7) - rig.red.basis.V).norm() == 0.0);
    CHECK((g.Gamma.bottomRightCorner(3, 3) - MatrixXd::Identity(3, 3)).norm() == 0.0);
    CHECK(g.Gamma.topRightCorner(7, 3).norm() == 0.0);

    std::mt19937_64 rng(9);
    const VectorXd x = oracle::random_matrix(53, 1, rng);
    const MatrixXd a = oracle::random_matrix(53, 53, rng);
    const MatrixXd p = a * a.transpose();
    CHECK((project_estimate(rig.red.basis, x) - g.Gamma * x).cwiseAbs().maxCoeff() <= 1e-12);
    const VectorXd xh = g.Gamma * x;
    CHECK((lift_estimate(rig.red.basis, xh) - g.GammaInv * xh).cwiseAbs().maxCoeff() <= 1e-12);
    const MatrixXd ph = project_covariance(rig.red.basis, p);
    CHECK(rel_block_error(g.Gamma * p * g.GammaInv, ph) <= 1e-13);
    CHECK(rel_block_error(g.GammaInv * ph * g.Gamma, lift_covariance(rig.red.basis, ph)) <= 1e-13);
    // projecting a lifted covariance is lossless
    CHECK(rel_block_error(project_covariance(rig.red.basis, lift_covariance(rig.red.basis, ph)), ph) <= 1e-12);
}

TEST_CASE("reconciliation")
{
    const auto m = support::default_model(10);
    const model::PhysicalParams& p = m.params();
    const ObserverConfig cfg;
    model::PlantInputs u;
    model::Disturbances w;
    const double m_h = 0.36;
    const double e_ref =
        oracle::bisect([&](double e) { return closure::g1_scalar(e, m_h, u.dP, u.mdot_a, p); }, 0.05, 0.999);
    const double t_ref =
        oracle::bisect([&](double t) { return closure::g2_scalar(t, u.T_a, w.phi_a, p); }, -20.0, u.T_a);

    const ReconcileResult exact = reconcile_algebraic(m.constraints(), m_h, {e_ref, t_ref}, u, w, cfg);
    CHECK(exact.ok);
    CHECK(exact.iterations == 0);

    const ReconcileResult moved = reconcile_algebraic(m.constraints(), m_h, {e_ref + 0.1, t_ref}, u, w, cfg);
    CHECK(moved.ok);
    CHECK(std::abs(moved.z(0) - e_ref) <= 1e-6);
    CHECK(std::abs(moved.z(1) - t_ref) <= 1e-6);
    CHECK(moved.residual <= 1e-8);

    model::Disturbances wet = w;
    wet.phi_a = 5.0;
    const Eigen::Vector2d z0(0.6, 30.0);
    const ReconcileResult bad = reconcile_algebraic(m.constraints(), m_h, z0, u, wet, cfg);
    CHECK(!bad.ok);
    CHECK((bad.z - z0).norm() == 0.0);
}

TEST_CASE("plausibility projection")
{
    const PlausibilityBounds b;
    VectorXd x(6);
    x << 0.1, 0.2, 0.3, 0.35, 0.6, 30.0;
    CHECK((plausibility_project(x, b) - x).norm() == 0.0);
    x(4) = 1.2;
    CHECK(plausibility_project(x, b)(4) == 1.0);

    std::mt19937_64 rng(10);
    for (int k = 0; k < 50; ++k) {
        const VectorXd y = oracle::random_matrix(8, 1, rng);
        const VectorXd once = plausibility_project(y, b);
        CHECK((plausibility_project(once, b) - once).norm() == 0.0);
        CHECK(once.head(5).minCoeff() >= 0.0);
        CHECK(once(5) >= b.m_h_floor);
        CHECK(once(6) >= 0.0);
        CHECK(once(6) <= 1.0);
    }
}

TEST_CASE("ekf step keeps the covariance symmetric and the estimate plausible")
{
    const Rig rig(40, 7);
    const model::SignalLog log = short_log(80.0, 3, rig.model);
    const harness::SyntheticRun run = harness::attach_measurements(log, rig.fom, rig.model, 0.006, 4);
    for (int variant : {1, 2}) {
        for (bool mat : {false, true}) {
            ObserverConfig cfg;
            cfg.variant = variant;
            cfg.materialize_covariance = mat;
            model::FomState init = model::steady_state(rig.model, log.samples[0].u, log.samples[0].w);
            init.m_h *= 1.2;
            init.x1 *= 0.8;
            EkfState s = make_ekf_state(init, cfg);
            for (std::size_t k = 1; k < run.log.size(); ++k) {
                const auto& smp = run.log.samples[k];
                s = ekf_step(s, smp.y, smp.u, smp.w, cfg, rig.red.rom, rig.red.basis, rig.model);
                const MatrixXd p = full_covariance(s, rig.red.basis);
                CHECK(asymmetry(p) <= 1e-9);
                CHECK(s.m_h() > 0.0);
                CHECK(s.eps() >= 0.0);
                CHECK(s.eps() <= 1.0);
                CHECK(s.k == long(k));
                CHECK(std::abs(covariance_trace(s) - p.trace()) <= 1e-10 * std::max(1.0, p.trace()));
                CHECK(!s.flags.gain_fallback);
            }
        }
    }
}

TEST_CASE("ekf step ignores an untrusted measurement")
{
    const Rig rig(30, 7);
    ObserverConfig cfg;
    cfg.nu = 1e30;
    model::FomState init = model::steady_state(rig.model, {}, {});
    init.m_h *= 1.1;
    const EkfState s0 = make_ekf_state(init, cfg);
    const EkfState a = ekf_step(s0, 0.0, {}, {}, cfg, rig.red.rom, rig.red.basis, rig.model);
    const EkfState b = ekf_step(s0, 1.0, {}, {}, cfg, rig.red.rom, rig.red.basis, rig.model);
    CHECK((a.x - b.x).cwiseAbs().maxCoeff() <= 1e-14);

    // with K = 0 the step is the nonlinear prediction plus reconciliation
    const model::ModelState pred = model::advance(
        rig.red.rom, rig.model, {rig.red.basis.project(init.x1), init.m_h, init.eps, init.T_s}, {}, {}, cfg.dt);
    CHECK((a.x.head(30) - rig.red.basis.lift(pred.x)).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(std::abs(a.m_h() - pred.m_h) <= 1e-14);
    CHECK_THROWS_AS(ekf_step(s0, std::nan(""), {}, {}, cfg, rig.red.rom, rig.red.basis, rig.model), DomainError);
}

TEST_CASE("lossless reduced observer matches the full-order observer")
{
    const int n = 20;
    const Rig rig(n, n);
    const mor::RomBasis identity = mor::RomBasis::make_identity(n);
    const model::SignalLog log = short_log(100.0, 12, rig.model);
    const harness::SyntheticRun run = harness::attach_measurements(log, rig.fom, rig.model, 0.0, 1);
    REQUIRE(run.log.size() == 51);
    ObserverConfig cfg;
    model::FomState init = model::steady_state(rig.model, log.samples[0].u, log.samples[0].w);
    init.m_h *= 1.15;
    init.x1 *= 1.1;
    EkfState red = make_ekf_state(init, cfg);
    EkfState full = red;
    double worst = 0.0;
    for (std::size_t k = 1; k < run.log.size(); ++k) {
        const auto& smp = run.log.samples[k];
        red = ekf_step(red, smp.y, smp.u, smp.w, cfg, rig.red.rom, rig.red.basis, rig.model);
        full = ekf_step(full, smp.y, smp.u, smp.w, cfg, rig.fom, identity, rig.model);
        worst = std::max(worst, (red.x - full.x).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-8);
}

TEST_CASE("exact start tracks the truth within the reduction error")
{
    const Rig rig(60, 7);
    const model::SignalLog log = short_log(600.0, 2, rig.model);
    const harness::SyntheticRun run = harness::attach_measurements(log, rig.fom, rig.model, 0.0, 1);
    const model::FomState x0 = model::steady_state(rig.model, log.samples[0].u, log.samples[0].w);
    const model::Trajectory open = model::simulate(rig.red.rom, rig.model, run.log,
                                                   {rig.red.basis.project(x0.x1), x0.m_h, x0.eps, x0.T_s});
    double rom_err = 0.0;
    for (std::size_t k = 0; k < run.log.size(); ++k) {
        rom_err = std::max(rom_err, std::abs(open.y[k] - run.truth.y[k]));
    }
    ObserverConfig cfg;
    const ObserverRun obs = run_observer(run.log, make_ekf_state(x0, cfg), cfg, rig.red.rom, rig.red.basis, rig.model);
    REQUIRE(!obs.failed);
    for (std::size_t k = 0; k < run.log.size(); ++k) {
        CHECK(std::abs(obs.rows[k].y_hat - run.truth.y[k]) <= rom_err);
    }
}

TEST_CASE("innovations are consistent with their predicted variance")
{
    const Rig rig(40, 7);
    const model::SignalLog log = short_log(1200.0, 8, rig.model);
    const double sigma = 0.006;
    const harness::SyntheticRun run = harness::attach_measurements(log, rig.fom, rig.model, sigma, 13);
    ObserverConfig cfg;
    const model::FomState x0 = model::steady_state(rig.model, log.samples[0].u, log.samples[0].w);
    EkfState s = make_ekf_state(x0, cfg);
    double sum2 = 0.0;
    double pred = 0.0;
    int count = 0;
    for (std::size_t k = 1; k < run.log.size(); ++k) {
        const auto& smp = run.log.samples[k];
        s = ekf_step(s, smp.y, smp.u, smp.w, cfg, rig.red.rom, rig.red.basis, rig.model);
        if (k > 50) {
            sum2 += s.innovation * s.innovation;
            pred += s.innovation_variance;
            ++count;
        }
    }
    const double ratio = (sum2 / count) / (pred / count);
    CHECK(ratio >= 1.0 / 3.0);
    CHECK(ratio <= 3.0);
}

TEST_CASE("observer config validation")
{
    ObserverConfig cfg;
    CHECK_NOTHROW(cfg.validate(10));
    cfg.variant = 3;
    CHECK_THROWS_AS(cfg.validate(10), ConfigError);
    cfg = {};
    cfg.nu = 0.0;
    CHECK_THROWS_AS(cfg.validate(10), ConfigError);
    cfg = {};
    cfg.omega = VectorXd::Ones(5);
    CHECK_THROWS_AS(cfg.validate(10), ConfigError);
    cfg.omega = -VectorXd::Ones(11);
    CHECK_THROWS_AS(cfg.validate(10), ConfigError);
    cfg = {};
    const MatrixXd p0 = initial_covariance(4, cfg, 2.0);
    CHECK(p0(0, 0) == 2.0 * cfg.p0_moisture);
    CHECK(p0(4, 4) == 2.0 * cfg.p0_holdup);
    CHECK(p0(6, 6) == 2.0 * cfg.p0_algebraic);
    CHECK((p0 - p0.transpose()).norm() == 0.0);
}
