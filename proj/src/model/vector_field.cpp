#include <cmath>
#include <sstream>

#include "vfbd/errors.hpp"
#include "vfbd/model/dryer_model.hpp"

namespace vfbd::model {

DryerModel::DryerModel(GridConfig grid, PhysicalParams params, GprSet gpr,
                       std::shared_ptr<const ConstraintModel> constraints)
    : grid_(grid), params_(params), gpr_(std::move(gpr)), constraints_(std::move(constraints))
{
    params_.validate();
    grid_ = make_grid(grid.n, grid.length);
    q_ = assemble_q_matrices(grid_, params_);
    if (!constraints_) {
        constraints_ = std::make_shared<ErgunPsychrometricConstraints>(params_);
    }
}

double DryerModel::holdup_rate(double m_h, double eps, const Coefficients& c, const Disturbances& w) const
{
    if (!(m_h > 0.0)) {
        throw DegenerateFeedError("holdup mass must be positive");
    }
    const double h_b = constraints_->bed_height(m_h, eps);
    return w.mdot_s - c.zeta * (m_h / grid_.length) * std::sqrt(2.0 * params_.g * h_b);
}

Uhat DryerModel::uhat(double m_h, double eps, double T_s, const Coefficients& c, const PlantInputs& u,
                      const Disturbances& w) const
{
    if (!(m_h > 0.0)) {
        throw DegenerateFeedError("holdup mass must be positive");
    }
    if (!(w.mdot_s > 0.0)) {
        throw DegenerateFeedError("solid feed must be positive to define the inlet moisture");
    }
    const double dY = constraints_->drying_potential(T_s, u, w);
    const double c_in = w.mdot_l / w.mdot_s;
    Uhat out;
    out << c.v, c.D, params_.k_d1 * u.mdot_a * dY / m_h, holdup_rate(m_h, eps, c, w) / m_h - 1.0, c.v * c_in;
    return out;
}

Uhat eval_vector_field(double m_h, double eps, double T_s, const PlantInputs& u, const Disturbances& w,
                       const DryerModel& model)
{
    return model.uhat(m_h, eps, T_s, model.coefficients(u), u, w);
}

FomDerivative eval_fom_rhs(const FomState& state, const PlantInputs& u, const Disturbances& w,
                           const DryerModel& model)
{
    if (state.x1.size() != model.grid().n) {
        throw DimensionError("eval_fom_rhs: moisture vector does not match the grid");
    }
    const Coefficients c = model.coefficients(u);
    const Uhat uh = model.uhat(state.m_h, state.eps, state.T_s, c, u, w);
    const QTensor& q = model.q();
    FomDerivative d;
    d.dx1 = -state.x1;
    for (int i = 0; i < 4; ++i) {
        d.dx1 += uh(i) * (q.q[i] * state.x1);
    }
    d.dx1 += q.b1 * uh(4);
    d.dm_h = model.holdup_rate(state.m_h, state.eps, c, w);
    return d;
}

double outlet_measurement(const Eigen::VectorXd& x1)
{
    if (x1.size() == 0) {
        throw DimensionError("outlet_measurement: empty moisture vector");
    }
    return x1(x1.size() - 1);
}

} // namespace vfbd::model
