#pragma once

#include <functional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "vfbd/errors.hpp"

namespace vfbd::numerics {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

using ResidualFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;
using SparseJacobianFn = std::function<SparseMatrix(const Vector&)>;

struct NewtonSettings {
    double abs_tol = 1e-10;       ///< on ||residual||_inf
    double step_tol = 1e-10;      ///< on ||dx||_inf / (1 + ||x||_inf)
    int max_iterations = 50;
    double min_damping = 1.0 / 1024.0;
};

struct NewtonReport {
    Vector solution;
    int iterations = 0;
    double residual_norm = 0.0;
};

/// Raised when Newton exhausts its iterations; carries the best iterate seen.
class NewtonError : public ConvergenceError {
public:
    NewtonError(const std::string& what, Vector best, double best_norm)
        : ConvergenceError(what), best_iterate(std::move(best)), best_residual(best_norm) {}
    Vector best_iterate;
    double best_residual;
};

/// Damped Newton iteration for residual(x) = 0.
///
/// Convergence requires ||r||_inf <= abs_tol and a Newton step below step_tol, so
/// rescaling the residual does not move the returned root. A full step is halved
/// until the residual norm decreases; evaluations that throw DomainError or
/// produce non-finite values count as an increase. An empty jacobian selects
/// central finite differences.
NewtonReport newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, Vector x0,
                          const NewtonSettings& settings = {});

NewtonReport newton_solve(const ResidualFn& residual, const SparseJacobianFn& jacobian, Vector x0,
                          const NewtonSettings& settings = {});

/// Central differences with step rel_step * max(1, |x_i|).
Matrix finite_difference_jacobian(const ResidualFn& residual, const Vector& x, double rel_step = 1e-6);

} // namespace vfbd::numerics
