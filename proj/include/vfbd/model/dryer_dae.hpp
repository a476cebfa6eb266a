#pragma once

#include "vfbd/model/bilinear_part.hpp"
#include "vfbd/model/dryer_model.hpp"
#include "vfbd/numerics/dae.hpp"

namespace vfbd::model {

/// Semi-explicit DAE with differential state y = [x; m_h] and algebraic state
/// z = [eps; T_s] for inputs frozen over one step. x lives in the coordinates
/// of the given bilinear part (full grid or reduced).
class DryerDae final : public numerics::SemiExplicitDae {
public:
    DryerDae(const BilinearPart& part, const DryerModel& model, const PlantInputs& u, const Disturbances& w);

    Eigen::Index differential_size() const override { return part_.order() + 1; }
    Eigen::Index algebraic_size() const override { return 2; }
    Eigen::VectorXd rhs(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const override;
    Eigen::VectorXd constraint(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const override;
    numerics::DaeJacobian jacobian(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const override;
    numerics::DenseDaeJacobian dense_jacobian(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const override;
    Eigen::MatrixXd constraint_jacobian_z(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const override;

    /// [uhat; mdot_h] at (m_h, eps, T_s).
    Eigen::Matrix<double, 6, 1> augmented(double m_h, double eps, double T_s) const;
    /// Central differences of augmented() with respect to (m_h, eps, T_s).
    Eigen::Matrix<double, 6, 3> augmented_jacobian(double m_h, double eps, double T_s) const;

    const Coefficients& coefficients() const { return coeff_; }
    const BilinearPart& part() const { return part_; }
    const DryerModel& model() const { return model_; }
    const PlantInputs& inputs() const { return u_; }
    const Disturbances& disturbances() const { return w_; }

private:
    const BilinearPart& part_;
    const DryerModel& model_;
    PlantInputs u_;
    Disturbances w_;
    Coefficients coeff_;
};

} // namespace vfbd::model
