#pragma once

#include <memory>

#include <Eigen/Dense>

#include "vfbd/model/constraints.hpp"
#include "vfbd/model/gpr.hpp"
#include "vfbd/model/q_matrices.hpp"
#include "vfbd/model/types.hpp"

namespace vfbd::model {

/// Assembled grey-box model: grid, parameters, discretization, coefficient maps
/// and algebraic closures. Immutable after construction.
class DryerModel {
public:
    DryerModel(GridConfig grid, PhysicalParams params, GprSet gpr,
               std::shared_ptr<const ConstraintModel> constraints = nullptr);

    const GridConfig& grid() const { return grid_; }
    const PhysicalParams& params() const { return params_; }
    const QTensor& q() const { return q_; }
    const GprSet& gpr() const { return gpr_; }
    const ConstraintModel& constraints() const { return *constraints_; }

    Coefficients coefficients(const PlantInputs& u) const { return gpr_.predict(u); }

    /// mdot_s - zeta (m_h / L) sqrt(2 g h_b).
    double holdup_rate(double m_h, double eps, const Coefficients& c, const Disturbances& w) const;

    /// The augmented input h(x2, u, w). DegenerateFeedError when m_h <= 0 or mdot_s <= 0.
    Uhat uhat(double m_h, double eps, double T_s, const Coefficients& c, const PlantInputs& u,
              const Disturbances& w) const;

private:
    GridConfig grid_;
    PhysicalParams params_;
    QTensor q_;
    GprSet gpr_;
    std::shared_ptr<const ConstraintModel> constraints_;
};

Uhat eval_vector_field(double m_h, double eps, double T_s, const PlantInputs& u, const Disturbances& w,
                       const DryerModel& model);

struct FomDerivative {
    Eigen::VectorXd dx1;
    double dm_h = 0.0;
};

/// Time derivative of (x1, m_h) through the bilinear form A x1 + sum uhat_i Q_i x1 + b1 uhat_5.
FomDerivative eval_fom_rhs(const FomState& state, const PlantInputs& u, const Disturbances& w,
                           const DryerModel& model);

/// c(L, t): the last grid entry.
double outlet_measurement(const Eigen::VectorXd& x1);

} // namespace vfbd::model
