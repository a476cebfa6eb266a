#pragma once

#include <Eigen/Dense>

#include "vfbd/model/types.hpp"

namespace vfbd::model {

/// Algebraic closures g(m_h, eps, T_s; u, w) = 0 and the derived quantities the
/// vector field needs. Implementations must be free of mutable state.
class ConstraintModel {
public:
    virtual ~ConstraintModel() = default;

    virtual Eigen::Vector2d residual(double m_h, double eps, double T_s, const PlantInputs& u,
                                     const Disturbances& w) const = 0;

    /// Columns d/dm_h, d/deps, d/dT_s. Defaults to central differences.
    virtual Eigen::Matrix<double, 2, 3> jacobian(double m_h, double eps, double T_s, const PlantInputs& u,
                                                 const Disturbances& w) const;

    /// Expanded bed height h_b (m).
    virtual double bed_height(double m_h, double eps) const = 0;

    /// Humidity difference Y_sat(T_s) - Y_in (kg/kg).
    virtual double drying_potential(double T_s, const PlantInputs& u, const Disturbances& w) const = 0;
};

/// Ergun pressure-drop balance for the porosity and an adiabatic-saturation
/// energy balance with Magnus vapour pressure for the saturation temperature.
class ErgunPsychrometricConstraints final : public ConstraintModel {
public:
    explicit ErgunPsychrometricConstraints(const PhysicalParams& params) : p_(params) {}

    Eigen::Vector2d residual(double m_h, double eps, double T_s, const PlantInputs& u,
                             const Disturbances& w) const override;
    Eigen::Matrix<double, 2, 3> jacobian(double m_h, double eps, double T_s, const PlantInputs& u,
                                         const Disturbances& w) const override;
    double bed_height(double m_h, double eps) const override;
    double drying_potential(double T_s, const PlantInputs& u, const Disturbances& w) const override;

    const PhysicalParams& params() const { return p_; }

private:
    PhysicalParams p_;
};

/// Magnus saturation pressure (Pa), T in deg C.
double saturation_pressure(double T);
/// Absolute humidity 0.622 p_v / (P_a - p_v); DomainError when p_v >= P_a.
double absolute_humidity(double p_v, double P_a);

/// Convenience: [g1, g2].
Eigen::Vector2d eval_algebraic_residual(double m_h, double eps, double T_s, const PlantInputs& u,
                                        const Disturbances& w, const PhysicalParams& params);

struct AlgebraicSolveSettings {
    double abs_tol = 1e-10;
    int max_iterations = 60;
};

/// Newton on g(m_h, ., .) = 0 for (eps, T_s) starting at z0.
Eigen::Vector2d solve_algebraic(const ConstraintModel& g, double m_h, const PlantInputs& u, const Disturbances& w,
                                const Eigen::Vector2d& z0, const AlgebraicSolveSettings& settings = {});

/// Starting point inside the domain for solve_algebraic when nothing better is known.
Eigen::Vector2d default_algebraic_guess(const PlantInputs& u);

} // namespace vfbd::model
