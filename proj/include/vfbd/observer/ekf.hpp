#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vfbd/model/bilinear_part.hpp"
#include "vfbd/model/dryer_model.hpp"
#include "vfbd/model/signal_log.hpp"
#include "vfbd/mor/bilinear.hpp"
#include "vfbd/observer/config.hpp"

namespace vfbd::observer {

struct ReconcileResult {
    Eigen::Vector2d z;
    bool ok = false;
    int iterations = 0;
    double residual = 0.0;
};

/// Newton on g(m_h, z) = 0 from z0, then clamped to the bounds. On failure z0 is returned with ok = false.
ReconcileResult reconcile_algebraic(const model::ConstraintModel& g, double m_h, const Eigen::Vector2d& z0,
                                    const model::PlantInputs& u, const model::Disturbances& w,
                                    const ObserverConfig& cfg);

/// m_h floored, eps clipped, x1 floored. Layout [x1; m_h; eps; T_s].
Eigen::VectorXd plausibility_project(Eigen::VectorXd x, const PlausibilityBounds& b);

/// One observer step with inputs held over (t_{k-1}, t_k] and the measurement at t_k.
/// part and basis describe the prediction model: a reduced system with its basis,
/// or the full bilinear system with the identity basis.
EkfState ekf_step(const EkfState& state, double y_meas, const model::PlantInputs& u, const model::Disturbances& w,
                  const ObserverConfig& cfg, const model::BilinearPart& part, const mor::RomBasis& basis,
                  const model::DryerModel& model);

/// P, lifting the reduced covariance when the state holds only that.
Eigen::MatrixXd full_covariance(const EkfState& state, const mor::RomBasis& basis);
/// trace(P); equals trace(P_hat) because T V = I.
double covariance_trace(const EkfState& state);

struct ObserverLogRow {
    double t = 0.0;
    double y_hat = 0.0;
    double m_h = 0.0;
    double eps = 0.0;
    double T_s = 0.0;
    double innovation = 0.0;
    double trace_p = 0.0;
    long step_ns = 0;
    StepFlags flags;
};

struct ObserverRun {
    std::vector<Eigen::VectorXd> estimates;   ///< one per log row, starting with the initial estimate
    std::vector<ObserverLogRow> rows;
    bool failed = false;
    std::string failure;
};

/// Runs the observer over the log; row 0 supplies the initial time only.
ObserverRun run_observer(const model::SignalLog& log, EkfState state, const ObserverConfig& cfg,
                         const model::BilinearPart& part, const mor::RomBasis& basis,
                         const model::DryerModel& model);

/// CSV: t,y_hat,m_h,eps,T_s,innovation,trace_P,step_ns,reconcile_failed,gain_fallback
void write_observer_log(const std::string& path, const std::vector<ObserverLogRow>& rows);

} // namespace vfbd::observer
