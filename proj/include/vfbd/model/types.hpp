#pragma once

#include <Eigen/Dense>

namespace vfbd::model {

struct GridConfig {
    int n = 0;         ///< grid points
    double length = 0; ///< bed length L (m)
    double dz = 0;     ///< L / n
};

/// Throws DimensionError for n < 2 and std::invalid_argument for length <= 0.
GridConfig make_grid(int n, double length);

struct PhysicalParams {
    double k_d1 = 25.0;        ///< drying-rate magnitude
    double rho_s = 700.0;      ///< solid density (kg/m^3)
    double rho_a = 1.1;        ///< air density (kg/m^3)
    double mu_a = 1.9e-5;      ///< air viscosity (Pa s)
    double d_p = 1e-3;         ///< particle diameter (m)
    double A_bed = 0.04;       ///< bed cross-section (m^2)
    double c_pa = 1006.0;      ///< air specific heat (J/kg/K)
    double dh_v = 2.45e6;      ///< latent heat of evaporation (J/kg)
    double P_a = 101325.0;     ///< air pressure (Pa)
    double g = 9.81;           ///< gravity (m/s^2)
    double lambda_phi = 0.5;   ///< decay length of the drying profile (m)

    /// Throws std::invalid_argument naming the first non-positive entry.
    void validate() const;
};

struct PlantInputs {
    double T_a = 65.0;     ///< inlet air temperature (deg C)
    double mdot_a = 0.04;  ///< drying air mass flow (kg/s)
    double a_vib = 1.0;    ///< vibration intensity (dimensionless scale)
    double dP = 130.0;     ///< bed pressure loss (Pa)
};

struct Disturbances {
    double mdot_s = 0.004;  ///< solid feed (kg/s)
    double mdot_l = 0.0009; ///< liquid feed (kg/s)
    double phi_a = 0.05;    ///< inlet relative humidity (fraction)
};

/// Full-order state [x1; m_h; eps; T_s].
struct FomState {
    Eigen::VectorXd x1;
    double m_h = 0.0;
    double eps = 0.0;
    double T_s = 0.0;
};

/// PDE coefficients delivered by the data-driven maps.
struct Coefficients {
    double v = 0.0;
    double D = 0.0;
    double zeta = 0.0;
};

/// Augmented input [v, D, k_d1 mdot_a dY / m_h, mdot_h / m_h - 1, v c_in].
using Uhat = Eigen::Matrix<double, 5, 1>;

} // namespace vfbd::model
