#pragma once

#include <vector>

#include <Eigen/Dense>

#include "vfbd/errors.hpp"
#include "vfbd/model/bilinear_part.hpp"
#include "vfbd/model/dryer_model.hpp"
#include "vfbd/model/signal_log.hpp"
#include "vfbd/numerics/collocation.hpp"

namespace vfbd::model {

/// State in the coordinates of a bilinear part plus the holdup and algebraic variables.
struct ModelState {
    Eigen::VectorXd x;
    double m_h = 0.0;
    double eps = 0.0;
    double T_s = 0.0;
};

struct SimulationOptions {
    numerics::CollocationScheme scheme = numerics::CollocationScheme::gauss_legendre();
    numerics::CollocationOptions collocation;
    /// Initial states with ||g||_inf above this are reconciled before the first step.
    double consistency_tol = 1e-8;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<ModelState> states;
    std::vector<double> y;
    std::vector<double> step_seconds;   ///< wall time of each collocation step
};

/// Integration failure at a given step.
class SimulationError : public NumericalError {
public:
    SimulationError(const std::string& what, std::size_t step) : NumericalError(what), step_index(step) {}
    std::size_t step_index;
};

/// One collocation step of the dryer DAE with inputs (u, w) held over dt.
ModelState advance(const BilinearPart& part, const DryerModel& model, const ModelState& state,
                   const PlantInputs& u, const Disturbances& w, double dt, const SimulationOptions& options = {});

/// Runs the log from x0; the trajectory has one entry per log row.
Trajectory simulate(const BilinearPart& part, const DryerModel& model, const SignalLog& log, ModelState x0,
                    const SimulationOptions& options = {});

/// Steady operating point of the full model for constant (u, w): holdup and
/// algebraic variables from a Newton solve, then x1 from the linear steady equation.
FomState steady_state(const DryerModel& model, const PlantInputs& u, const Disturbances& w,
                      double m_h_guess = 0.35);

/// Reconciles (eps, T_s) for the given holdup; returns the state unchanged when already consistent.
ModelState make_consistent(const DryerModel& model, ModelState state, const PlantInputs& u, const Disturbances& w,
                           double tol = 1e-8);

} // namespace vfbd::model
