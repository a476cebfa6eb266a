#pragma once

#include <Eigen/Dense>

#include "vfbd/model/constraints.hpp"
#include "vfbd/model/simulation.hpp"
#include "vfbd/model/types.hpp"

namespace vfbd::observer {

/// Physically permissible region the estimate is projected onto after each step.
struct PlausibilityBounds {
    double m_h_floor = 1e-3;
    double eps_min = 0.0;
    double eps_max = 1.0;
    double x1_min = 0.0;
};

struct ObserverConfig {
    int variant = 2;                  ///< 1: algebraic states eliminated, 2: augmented
    double dt = 2.0;
    double nu = 0.006 * 0.006;        ///< measurement noise variance
    Eigen::VectorXd omega;            ///< state noise, length N+1; empty selects omega_default
    double omega_default = 1e-6;
    double p0_moisture = 1e-2;
    double p0_holdup = 1e-1;
    double p0_algebraic = 1e-2;
    PlausibilityBounds bounds;
    bool negate_psi = false;          ///< use -J4^-1 J3 as the lower block of Psi
    double j4_condition_limit = 1e12;
    Eigen::Index expm_cap = 400;
    double reconcile_tol = 1e-8;
    int reconcile_max_iterations = 30;
    /// Keep P in full (N+3) form after every step. Otherwise the state carries the
    /// reduced covariance and full_covariance() lifts it on demand.
    bool materialize_covariance = false;
    model::SimulationOptions prediction;

    /// Throws ConfigError on invalid settings for an N-point grid.
    void validate(Eigen::Index n) const;
    Eigen::VectorXd omega_for(Eigen::Index n) const;
};

struct StepFlags {
    bool reconcile_failed = false;
    bool gain_fallback = false;
};

/// Full-order estimate [x1; m_h; eps; T_s] and its covariance. The covariance is
/// either P (full) or P_hat with P = GammaInv P_hat Gamma; the next step projects
/// P back to Gamma P GammaInv = P_hat exactly, so the reduced form is kept.
struct EkfState {
    Eigen::VectorXd x;
    Eigen::MatrixXd P;       ///< (N+3) x (N+3), empty while held in reduced form
    Eigen::MatrixXd P_hat;   ///< (r+3) x (r+3)
    long k = 0;
    double innovation = 0.0;
    double innovation_variance = 0.0;
    StepFlags flags;

    Eigen::Index grid_size() const { return x.size() - 3; }
    double m_h() const { return x(x.size() - 3); }
    double eps() const { return x(x.size() - 2); }
    double T_s() const { return x(x.size() - 1); }
};

/// diag(p0_moisture (N), p0_holdup, p0_algebraic, p0_algebraic), times scale.
Eigen::MatrixXd initial_covariance(Eigen::Index n, const ObserverConfig& cfg, double scale = 1.0);

EkfState make_ekf_state(const model::FomState& x0, const ObserverConfig& cfg, double p0_scale = 1.0);

Eigen::VectorXd stack_state(const model::FomState& s);
model::FomState unstack_state(const Eigen::VectorXd& x);

} // namespace vfbd::observer
