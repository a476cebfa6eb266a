#pragma once

#include <string>

#include "vfbd/numerics/dae.hpp"
#include "vfbd/numerics/newton.hpp"

namespace vfbd::numerics {

enum class CollocationFamily { GaussLegendre, RadauIIA };

/// Three-stage collocation tableau on (0, 1].
struct CollocationScheme {
    CollocationFamily family = CollocationFamily::GaussLegendre;
    Eigen::Vector3d nodes;
    Eigen::Vector3d weights;
    Eigen::Matrix3d coefficients;   ///< a_jl = integral_0^{c_j} l_l(s) ds
    Eigen::Vector3d end_lagrange;   ///< l_l(1), extrapolates node values to the step end

    static CollocationScheme gauss_legendre();
    static CollocationScheme radau_iia();
    static CollocationScheme from_name(const std::string& name);
};

struct CollocationOptions {
    NewtonSettings newton{1e-9, 1e-10, 30, 1.0 / 1024.0};
    /// Re-solve g(y1, z) = 0 for the end-point algebraic state (Gauss nodes exclude tau = 1).
    bool reconcile_endpoint = true;
    /// Below this many unknowns the stage system is factorized densely.
    Eigen::Index dense_threshold = 120;
    /// Factor the stage Jacobian once per step and iterate with it; falls back to
    /// full Newton when the iteration stops contracting.
    bool simplified_newton = true;
    int simplified_max_iterations = 12;
};

/// Raised when the stage Newton iteration fails; carries the failing context.
class CollocationError : public ConvergenceError {
public:
    using ConvergenceError::ConvergenceError;
};

/// Advances the DAE by dt; g = 0 is enforced at every collocation node and all
/// stage derivatives and node algebraics are solved as one Newton system.
DaeState collocation_step(const SemiExplicitDae& dae, const DaeState& state, double dt,
                          const CollocationScheme& scheme = CollocationScheme::gauss_legendre(),
                          const CollocationOptions& options = {});

} // namespace vfbd::numerics
