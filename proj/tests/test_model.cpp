#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "vfbd/model/constraints.hpp"
#include "vfbd/model/dryer_model.hpp"
#include "vfbd/model/gpr.hpp"
#include "vfbd/model/q_matrices.hpp"
#include "vfbd/model/simulation.hpp"
#include "closures.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace vfbd;
using namespace vfbd::model;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace closure;

TEST_CASE("Q matrices follow the stencils")
{
    const QTensor q = assemble_q_matrices(make_grid(3, 1.5), PhysicalParams{});
    MatrixXd q1(3, 3);
    q1 << -1, 0, 0, 1, -1, 0, 0, 1, -1;
    CHECK((MatrixXd(q.q[0]) - 2.0 * q1).norm() == 0.0);

    const QTensor q2 = assemble_q_matrices(make_grid(2, 2.0), PhysicalParams{});
    MatrixXd expect(2, 2);
    expect << -1, 1, 1, -1;
    CHECK((MatrixXd(q2.q[1]) - expect).norm() == 0.0);

    PhysicalParams flat;
    flat.lambda_phi = 1e300;
    const QTensor q3 = assemble_q_matrices(make_grid(7, 1.0), flat);
    CHECK((MatrixXd(q3.q[2]) + MatrixXd::Identity(7, 7)).norm() == 0.0);
    CHECK((MatrixXd(q3.q[3]) + MatrixXd::Identity(7, 7)).norm() == 0.0);

    CHECK_THROWS_AS(make_grid(1, 1.0), DimensionError);
}

TEST_CASE("Q matrix invariants")
{
    for (int n : {2, 5, 40}) {
        const GridConfig g = make_grid(n, 1.0);
        const QTensor q = assemble_q_matrices(g, PhysicalParams{});
        const VectorXd s1 = MatrixXd(q.q[0]).rowwise().sum();
        CHECK(s1(0) == doctest::Approx(-1.0 / g.dz));
        CHECK(s1.tail(n - 1).cwiseAbs().maxCoeff() == 0.0);
        CHECK(MatrixXd(q.q[1]).rowwise().sum().cwiseAbs().maxCoeff() <= 1e-9);
        CHECK((MatrixXd(q.q[1]) - MatrixXd(q.q[1]).transpose()).norm() == 0.0);
        const VectorXd d3 = MatrixXd(q.q[2]).diagonal();
        CHECK(d3.maxCoeff() <= 0.0);
        CHECK(MatrixXd(q.q[2]).norm() == doctest::Approx(d3.norm()));
        CHECK(q.b1(0) == doctest::Approx(1.0 / g.dz));
        CHECK(q.b1.tail(n - 1).norm() == 0.0);
    }
}

TEST_CASE("drying profile")
{
    CHECK(drying_profile(0.0, 0.5) == 1.0);
    CHECK(drying_profile(0.5, 0.5) == doctest::Approx(0.36787944117144233));
    CHECK(drying_profile(1.0, 0.5) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
    double prev = 1.0;
    for (int i = 1; i <= 20; ++i) {
        const double v = drying_profile(0.05 * i, 0.5);
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("gpr interpolates and matches 2x2 closed forms")
{
    GprHyper h;
    h.length_scales = {0.5, 0.5};
    h.signal_variance = 2.0;
    h.noise_variance = 0.0;

    Eigen::MatrixX2d one(1, 2);
    one << 0.1, 0.2;
    const GprModel m1 = GprModel::fit(one, VectorXd::Constant(1, 3.5), h);
    CHECK(m1.predict_raw({0.1, 0.2}) == doctest::Approx(3.5).epsilon(1e-14));

    Eigen::MatrixX2d two(2, 2);
    two << 0.0, 0.0, 0.4, 0.3;
    VectorXd y(2);
    y << 1.0, -2.0;
    const GprModel m2 = GprModel::fit(two, y, h);
    auto k = [&](Eigen::Vector2d a, Eigen::Vector2d b) {
        return 2.0 * std::exp(-0.5 * ((a - b).array() / 0.5).square().sum());
    };
    const Eigen::Vector2d x(0.25, 0.05);
    Eigen::Matrix2d kk;
    kk << k(two.row(0), two.row(0)), k(two.row(0), two.row(1)), k(two.row(1), two.row(0)),
        k(two.row(1), two.row(1));
    const Eigen::Vector2d ks(k(x, two.row(0)), k(x, two.row(1)));
    CHECK(m2.predict_raw(x) == doctest::Approx(ks.dot(kk.inverse() * y)).epsilon(1e-12));
    CHECK(m2.predict_raw(two.row(1).transpose()) == doctest::Approx(-2.0).epsilon(1e-12));

    // symmetric pair, equal targets: y* 2 k / (1 + k'), unit signal variance
    GprHyper hu = h;
    hu.signal_variance = 1.0;
    Eigen::MatrixX2d sym(2, 2);
    sym << -0.3, 0.0, 0.3, 0.0;
    const GprModel ms = GprModel::fit(sym, VectorXd::Constant(2, 0.8), hu);
    const double kmid = std::exp(-0.5 * std::pow(0.3 / 0.5, 2));
    const double kpair = std::exp(-0.5 * std::pow(0.6 / 0.5, 2));
    CHECK(ms.predict_raw({0.0, 0.0}) == doctest::Approx(0.8 * 2.0 * kmid / (1.0 + kpair)).epsilon(1e-13));
}

TEST_CASE("gpr duplicate inputs need noise and then average")
{
    GprHyper h;
    h.length_scales = {1.0, 1.0};
    h.signal_variance = 1.5;
    h.noise_variance = 0.0;
    Eigen::MatrixX2d dup(2, 2);
    dup << 0.2, 0.2, 0.2, 0.2;
    VectorXd y(2);
    y << 1.0, 2.0;
    CHECK_THROWS_AS(GprModel::fit(dup, y, h), SingularMatrixError);
    h.noise_variance = 0.1;
    const GprModel m = GprModel::fit(dup, y, h);
    CHECK(m.predict({0.2, 0.2}) == doctest::Approx(1.5 * 3.0 / (2 * 1.5 + 0.1)).epsilon(1e-13));
}

TEST_CASE("gpr decays to the floor far from the data")
{
    GprHyper h;
    h.length_scales = {0.02, 0.8};
    h.signal_variance = 1e-4;
    h.floor = 1e-8;
    const GprTrainingSet t = synthetic_gpr_training();
    const GprModel m = GprModel::fit(t.theta, t.v, h);
    CHECK(m.predict({5.0, 50.0}) == 1e-8);
}

TEST_CASE("fitted coefficient maps reproduce the reference surfaces")
{
    const GprSet set = fit_gpr_set(synthetic_gpr_training());
    for (double ma : {0.031, 0.04, 0.047}) {
        for (double av : {0.65, 1.0, 1.33}) {
            const Coefficients ref = reference_coefficients(ma, av);
            PlantInputs u;
            u.mdot_a = ma;
            u.a_vib = av;
            const Coefficients c = set.predict(u);
            CHECK(std::abs(c.v - ref.v) <= 1e-3 * ref.v);
            CHECK(std::abs(c.D - ref.D) <= 1e-3 * ref.D);
            CHECK(std::abs(c.zeta - ref.zeta) <= 1e-3 * ref.zeta);
        }
    }
}

TEST_CASE("gpr training csv round trip")
{
    const GprTrainingSet t = synthetic_gpr_training(3);
    const auto path = std::filesystem::temp_directory_path() / "vfbd_gpr_roundtrip.csv";
    save_gpr_training(t, path.string());
    const GprTrainingSet back = load_gpr_training(path.string());
    CHECK((back.theta - t.theta).norm() == 0.0);
    CHECK((back.zeta - t.zeta).norm() == 0.0);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_gpr_training("/nonexistent/file.csv"), IoError);
}

TEST_CASE("constraint trivial cases")
{
    const PhysicalParams p;
    PlantInputs u;
    Disturbances w;
    w.phi_a = 1.0;
    CHECK(eval_algebraic_residual(0.36, 0.6, u.T_a, u, w, p)(1) == doctest::Approx(0.0).epsilon(1e-9));
    u.mdot_a = 0.0;
    CHECK(eval_algebraic_residual(0.36, 0.6, 30.0, u, w, p)(0) == u.dP);
    CHECK_THROWS_AS(eval_algebraic_residual(0.36, 1.0, 30.0, u, w, p), DomainError);
    CHECK_THROWS_AS(eval_algebraic_residual(0.36, 0.0, 30.0, u, w, p), DomainError);
    CHECK_THROWS_AS(eval_algebraic_residual(0.36, 0.5, 101.0, u, w, p), DomainError);
}

TEST_CASE("constraint roots match bisection")
{
    const PhysicalParams p;
    const ErgunPsychrometricConstraints g(p);
    for (double m_h : {0.3, 0.36, 0.45}) {
        for (double dP : {100.0, 130.0, 160.0}) {
            for (double ta : {55.0, 75.0}) {
                PlantInputs u;
                u.dP = dP;
                u.T_a = ta;
                Disturbances w;
                const double e_ref =
                    oracle::bisect([&](double e) { return g1_scalar(e, m_h, dP, u.mdot_a, p); }, 0.05, 0.999);
                const double t_ref =
                    oracle::bisect([&](double t) { return g2_scalar(t, ta, w.phi_a, p); }, -20.0, ta);
                const Eigen::Vector2d z = solve_algebraic(g, m_h, u, w, default_algebraic_guess(u));
                CHECK(std::abs(z(0) - e_ref) <= 1e-8);
                CHECK(std::abs(z(1) - t_ref) <= 1e-8);
                CHECK(g.residual(m_h, z(0), z(1), u, w).lpNorm<Eigen::Infinity>() <= 1e-10);
            }
        }
    }
}

TEST_CASE("constraint jacobian matches central differences at two steps")
{
    const PhysicalParams p;
    const ErgunPsychrometricConstraints g(p);
    PlantInputs u;
    Disturbances w;
    const Eigen::Vector3d x(0.37, 0.63, 31.0);
    const Eigen::Matrix<double, 2, 3> j = g.jacobian(x(0), x(1), x(2), u, w);
    const auto f = [&](const VectorXd& v) -> VectorXd { return g.residual(v(0), v(1), v(2), u, w); };
    for (double h : {1e-5, 1e-6}) {
        const MatrixXd fd = oracle::central_jacobian(f, x, h);
        CHECK((fd - j).norm() <= 1e-5 * j.norm());
    }
}

TEST_CASE("vector field examples")
{
    const DryerModel m = support::default_model(20);
    PlantInputs u;
    Disturbances w;
    const Coefficients c = m.coefficients(u);
    const double m_h = 0.36;
    const Eigen::Vector2d z = solve_algebraic(m.constraints(), m_h, u, w, default_algebraic_guess(u));
    const double hb = m.constraints().bed_height(m_h, z(0));
    Disturbances steady = w;
    steady.mdot_s = c.zeta * m_h / m.grid().length * std::sqrt(2 * 9.81 * hb);
    CHECK(eval_vector_field(m_h, z(0), z(1), u, steady, m)(3) == doctest::Approx(-1.0).epsilon(1e-14));

    Disturbances dry = w;
    dry.mdot_l = 0.0;
    CHECK(eval_vector_field(m_h, z(0), z(1), u, dry, m)(4) == 0.0);

    const PhysicalParams& p = m.params();
    const double dY = hum(psat(z(1)), p.P_a) - hum(w.phi_a * psat(u.T_a), p.P_a);
    CHECK(eval_vector_field(m_h, z(0), z(1), u, w, m)(2) ==
          doctest::Approx(p.k_d1 * u.mdot_a * dY / m_h).epsilon(1e-13));

    Disturbances nofeed = w;
    nofeed.mdot_s = 0.0;
    CHECK_THROWS_AS(eval_vector_field(m_h, z(0), z(1), u, nofeed, m), DegenerateFeedError);
    CHECK_THROWS_AS(eval_vector_field(0.0, z(0), z(1), u, w, m), DegenerateFeedError);
}

TEST_CASE("fom rhs of a uniform field without drying")
{
    const DryerModel m = support::default_model(10);
    PlantInputs u;
    Disturbances w;
    w.phi_a = 1.0;
    FomState s;
    s.m_h = 0.36;
    s.eps = solve_algebraic(m.constraints(), s.m_h, u, w, default_algebraic_guess(u))(0);
    s.T_s = u.T_a;   // saturated inlet air: no drying potential
    const Coefficients c = m.coefficients(u);
    w.mdot_s = c.zeta * s.m_h / m.grid().length * std::sqrt(2 * 9.81 * m.constraints().bed_height(s.m_h, s.eps));
    s.x1 = VectorXd::Constant(10, 0.2);
    const FomDerivative d = eval_fom_rhs(s, u, w, m);
    CHECK(d.dm_h == doctest::Approx(0.0).scale(1e-3));
    CHECK(d.dx1.tail(9).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(d.dx1(0) == doctest::Approx(c.v * (w.mdot_l / w.mdot_s - 0.2) / m.grid().dz).epsilon(1e-12));
}

TEST_CASE("fom rhs equals direct evaluation of the semi-discrete PDE")
{
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unif(0.0, 0.4);
    for (int n : {5, 17, 50}) {
        const DryerModel m = support::default_model(n);
        for (int trial = 0; trial < 5; ++trial) {
            PlantInputs u;
            u.mdot_a = 0.03 + 0.05 * unif(rng);
            u.a_vib = 0.6 + 2.0 * unif(rng);
            Disturbances w;
            w.phi_a = 0.02 + 0.2 * unif(rng);
            FomState s;
            s.m_h = 0.3 + unif(rng) / 2;
            s.eps = 0.5 + unif(rng) / 2;
            s.T_s = 20.0 + 30.0 * unif(rng);
            s.x1.resize(n);
            for (int i = 0; i < n; ++i) s.x1(i) = unif(rng);
            const VectorXd ref = direct_pde(s, u, w, m);
            const VectorXd got = eval_fom_rhs(s, u, w, m).dx1;
            CHECK((got - ref).lpNorm<Eigen::Infinity>() <= 1e-12 * ref.lpNorm<Eigen::Infinity>());
        }
    }
}

TEST_CASE("outlet measurement")
{
    CHECK(outlet_measurement(Eigen::Vector3d(1, 2, 3)) == 3.0);
    CHECK(outlet_measurement(VectorXd::Zero(4)) == 0.0);
}

TEST_CASE("steady state is an equilibrium")
{
    const DryerModel m = support::default_model(60);
    PlantInputs u;
    Disturbances w;
    const FomState s = steady_state(m, u, w);
    CHECK(s.m_h > 0.1);
    CHECK(s.eps > 0.0);
    CHECK(s.eps < 1.0);
    CHECK(s.x1.minCoeff() >= 0.0);
    CHECK(m.constraints().residual(s.m_h, s.eps, s.T_s, u, w).lpNorm<Eigen::Infinity>() <= 1e-8);
    const FomDerivative d = eval_fom_rhs(s, u, w, m);
    CHECK(std::abs(d.dm_h) <= 1e-12);
    CHECK(d.dx1.lpNorm<Eigen::Infinity>() <= 1e-10 * s.x1.lpNorm<Eigen::Infinity>() / m.grid().dz);
    MESSAGE("steady m_h=" << s.m_h << " eps=" << s.eps << " T_s=" << s.T_s << " outlet=" << s.x1(59)
                          << " inlet=" << s.x1(0));
}
