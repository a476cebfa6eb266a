#include "vfbd/model/constraints.hpp"

#include <cmath>
#include <sstream>

#include "vfbd/errors.hpp"
#include "vfbd/numerics/newton.hpp"

namespace vfbd::model {

namespace {

constexpr double kMagnusA = 610.94;
constexpr double kMagnusB = 17.625;
constexpr double kMagnusC = 243.04;
constexpr double kMolarRatio = 0.622;

void check_porosity(double eps)
{
    if (!(eps > 0.0 && eps < 1.0)) {
        std::ostringstream msg;
        msg << "porosity " << eps << " outside (0, 1)";
        throw DomainError(msg.str());
    }
}

void check_humidity(double phi)
{
    if (!(phi >= 0.0 && phi <= 1.0)) {
        std::ostringstream msg;
        msg << "relative humidity " << phi << " outside [0, 1]";
        throw DomainError(msg.str());
    }
}

} // namespace

double saturation_pressure(double T)
{
    if (!(T > -kMagnusC)) {
        throw DomainError("saturation_pressure: temperature below the Magnus pole");
    }
    return kMagnusA * std::exp(kMagnusB * T / (T + kMagnusC));
}

double absolute_humidity(double p_v, double P_a)
{
    if (!(p_v < P_a)) {
        throw DomainError("absolute_humidity: vapour pressure reaches the air pressure");
    }
    return kMolarRatio * p_v / (P_a - p_v);
}

Eigen::Matrix<double, 2, 3> ConstraintModel::jacobian(double m_h, double eps, double T_s, const PlantInputs& u,
                                                     const Disturbances& w) const
{
    Eigen::Matrix<double, 2, 3> j;
    const double x[3] = {m_h, eps, T_s};
    for (int k = 0; k < 3; ++k) {
        double xp[3] = {x[0], x[1], x[2]};
        double xm[3] = {x[0], x[1], x[2]};
        const double h = 1e-6 * std::max(1.0, std::abs(x[k]));
        xp[k] += h;
        xm[k] -= h;
        j.col(k) = (residual(xp[0], xp[1], xp[2], u, w) - residual(xm[0], xm[1], xm[2], u, w)) / (2.0 * h);
    }
    return j;
}

double ErgunPsychrometricConstraints::bed_height(double m_h, double eps) const
{
    check_porosity(eps);
    return m_h / (p_.rho_s * p_.A_bed * (1.0 - eps));
}

double ErgunPsychrometricConstraints::drying_potential(double T_s, const PlantInputs& u, const Disturbances& w) const
{
    check_humidity(w.phi_a);
    const double y_sat = absolute_humidity(saturation_pressure(T_s), p_.P_a);
    const double y_in = absolute_humidity(w.phi_a * saturation_pressure(u.T_a), p_.P_a);
    return y_sat - y_in;
}

Eigen::Vector2d ErgunPsychrometricConstraints::residual(double m_h, double eps, double T_s, const PlantInputs& u,
                                                        const Disturbances& w) const
{
    const double h_b = bed_height(m_h, eps);
    const double u_s = u.mdot_a / (p_.rho_a * p_.A_bed);
    const double e3 = eps * eps * eps;
    const double viscous = 150.0 * p_.mu_a * (1.0 - eps) * (1.0 - eps) / (e3 * p_.d_p * p_.d_p) * u_s;
    const double inertial = 1.75 * (1.0 - eps) * p_.rho_a / (e3 * p_.d_p) * u_s * u_s;
    const double g1 = u.dP - h_b * (viscous + inertial);
    const double g2 = p_.c_pa * (u.T_a - T_s) - drying_potential(T_s, u, w) * p_.dh_v;
    return {g1, g2};
}

Eigen::Matrix<double, 2, 3> ErgunPsychrometricConstraints::jacobian(double m_h, double eps, double T_s,
                                                                    const PlantInputs& u,
                                                                    const Disturbances& w) const
{
    check_porosity(eps);
    check_humidity(w.phi_a);
    // g1 = dP - m_h / (rho_s A) * F(eps),  F = (c1 (1 - eps) + c2) / eps^3
    const double u_s = u.mdot_a / (p_.rho_a * p_.A_bed);
    const double c1 = 150.0 * p_.mu_a * u_s / (p_.d_p * p_.d_p);
    const double c2 = 1.75 * p_.rho_a * u_s * u_s / p_.d_p;
    const double e3 = eps * eps * eps;
    const double f = (c1 * (1.0 - eps) + c2) / e3;
    const double df = (-c1 * (3.0 - 2.0 * eps) - 3.0 * c2) / (e3 * eps);
    const double mass_scale = 1.0 / (p_.rho_s * p_.A_bed);

    const double p_sat = saturation_pressure(T_s);
    if (!(p_sat < p_.P_a)) {
        throw DomainError("saturation pressure reaches the air pressure");
    }
    const double dp_dT = p_sat * kMagnusB * kMagnusC / ((T_s + kMagnusC) * (T_s + kMagnusC));
    const double dy_dp = kMolarRatio * p_.P_a / ((p_.P_a - p_sat) * (p_.P_a - p_sat));

    Eigen::Matrix<double, 2, 3> j;
    j << -mass_scale * f, -m_h * mass_scale * df, 0.0,
         0.0, 0.0, -p_.c_pa - p_.dh_v * dy_dp * dp_dT;
    return j;
}

Eigen::Vector2d eval_algebraic_residual(double m_h, double eps, double T_s, const PlantInputs& u,
                                        const Disturbances& w, const PhysicalParams& params)
{
    return ErgunPsychrometricConstraints(params).residual(m_h, eps, T_s, u, w);
}

Eigen::Vector2d default_algebraic_guess(const PlantInputs& u)
{
    return {0.6, 0.5 * u.T_a};
}

Eigen::Vector2d solve_algebraic(const ConstraintModel& g, double m_h, const PlantInputs& u, const Disturbances& w,
                                const Eigen::Vector2d& z0, const AlgebraicSolveSettings& settings)
{
    if (!(m_h > 0.0)) {
        throw DegenerateFeedError("solve_algebraic: holdup must be positive");
    }
    numerics::NewtonSettings ns;
    ns.abs_tol = settings.abs_tol;
    ns.max_iterations = settings.max_iterations;
    const auto residual = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
        return g.residual(m_h, z(0), z(1), u, w);
    };
    const auto jac = [&](const Eigen::VectorXd& z) -> Eigen::MatrixXd {
        return g.jacobian(m_h, z(0), z(1), u, w).rightCols<2>();
    };
    return numerics::newton_solve(residual, jac, Eigen::VectorXd(z0), ns).solution;
}

} // namespace vfbd::model
