#include "vfbd/numerics/newton.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <Eigen/SparseLU>

namespace vfbd::numerics {

namespace {

constexpr double kSingularRcond = 1e-15;

// Residual norm, or +inf when the residual cannot be evaluated at x.
double safe_norm(const ResidualFn& residual, const Vector& x, Vector* out)
{
    try {
        Vector r = residual(x);
        if (!r.allFinite()) {
            return std::numeric_limits<double>::infinity();
        }
        double norm = r.size() == 0 ? 0.0 : r.lpNorm<Eigen::Infinity>();
        if (out) {
            *out = std::move(r);
        }
        return norm;
    } catch (const DomainError&) {
        return std::numeric_limits<double>::infinity();
    } catch (const DegenerateFeedError&) {
        return std::numeric_limits<double>::infinity();
    }
}

template <typename StepSolver>
NewtonReport newton_core(const ResidualFn& residual, StepSolver&& solve_step, Vector x,
                         const NewtonSettings& settings)
{
    Vector r;
    double norm = safe_norm(residual, x, &r);
    if (!std::isfinite(norm)) {
        throw DomainError("newton_solve: residual not evaluable at the initial point");
    }
    Vector best = x;
    double best_norm = norm;

    for (int iter = 0; iter <= settings.max_iterations; ++iter) {
        Vector dx = solve_step(x, r);
        const double step = dx.size() == 0 ? 0.0 : dx.lpNorm<Eigen::Infinity>();
        const double scale = 1.0 + (x.size() == 0 ? 0.0 : x.lpNorm<Eigen::Infinity>());
        if (norm <= settings.abs_tol && step <= settings.step_tol * scale) {
            // The step is already negligible; taking it only sharpens the root.
            Vector refined = x + dx;
            Vector r_refined;
            double n_refined = safe_norm(residual, refined, &r_refined);
            if (n_refined <= norm) {
                return {std::move(refined), iter, n_refined};
            }
            return {std::move(x), iter, norm};
        }
        if (iter == settings.max_iterations) {
            break;
        }

        double damping = 1.0;
        Vector trial;
        Vector r_trial;
        double n_trial = std::numeric_limits<double>::infinity();
        while (true) {
            trial = x + damping * dx;
            n_trial = safe_norm(residual, trial, &r_trial);
            if (n_trial < norm || (norm <= settings.abs_tol && std::isfinite(n_trial))) {
                break;
            }
            if (damping <= settings.min_damping) {
                break;
            }
            damping *= 0.5;
        }
        if (!std::isfinite(n_trial)) {
            break;
        }
        x = std::move(trial);
        r = std::move(r_trial);
        norm = n_trial;
        if (norm < best_norm) {
            best_norm = norm;
            best = x;
        }
    }

    std::ostringstream msg;
    msg << "newton_solve: no convergence after " << settings.max_iterations
        << " iterations (best residual " << best_norm << ")";
    throw NewtonError(msg.str(), std::move(best), best_norm);
}

} // namespace

Matrix finite_difference_jacobian(const ResidualFn& residual, const Vector& x, double rel_step)
{
    const Vector r0 = residual(x);
    Matrix jac(r0.size(), x.size());
    Vector xp = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        const double h = rel_step * std::max(1.0, std::abs(x(j)));
        xp(j) = x(j) + h;
        const Vector rp = residual(xp);
        xp(j) = x(j) - h;
        const Vector rm = residual(xp);
        xp(j) = x(j);
        jac.col(j) = (rp - rm) / (2.0 * h);
    }
    return jac;
}

NewtonReport newton_solve(const ResidualFn& residual, const JacobianFn& jacobian, Vector x0,
                          const NewtonSettings& settings)
{
    auto solve_step = [&](const Vector& x, const Vector& r) -> Vector {
        if (x.size() == 0) {
            return Vector();
        }
        const Matrix jac = jacobian ? jacobian(x) : finite_difference_jacobian(residual, x);
        if (jac.rows() != r.size() || jac.cols() != x.size()) {
            throw DimensionError("newton_solve: Jacobian has wrong shape");
        }
        Eigen::PartialPivLU<Matrix> lu(jac);
        if (!(lu.rcond() > kSingularRcond)) {
            throw SingularMatrixError("newton_solve: singular Jacobian");
        }
        return -lu.solve(r);
    };
    return newton_core(residual, solve_step, std::move(x0), settings);
}

NewtonReport newton_solve(const ResidualFn& residual, const SparseJacobianFn& jacobian, Vector x0,
                          const NewtonSettings& settings)
{
    Eigen::SparseLU<SparseMatrix> lu;
    auto solve_step = [&](const Vector& x, const Vector& r) -> Vector {
        SparseMatrix jac = jacobian(x);
        jac.makeCompressed();
        lu.compute(jac);
        if (lu.info() != Eigen::Success) {
            throw SingularMatrixError("newton_solve: singular sparse Jacobian");
        }
        Vector dx = -lu.solve(r);
        if (!dx.allFinite()) {
            throw SingularMatrixError("newton_solve: singular sparse Jacobian");
        }
        return dx;
    };
    return newton_core(residual, solve_step, std::move(x0), settings);
}

} // namespace vfbd::numerics
