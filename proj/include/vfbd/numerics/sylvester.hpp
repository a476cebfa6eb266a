#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "vfbd/errors.hpp"

namespace vfbd::numerics {

/// A shifted operator A + s I was singular for an eigenvalue s of B.
class SpectralOverlapError : public SingularMatrixError {
public:
    using SingularMatrixError::SingularMatrixError;
};

/// Reusable solver for A X + X B + C = 0 with fixed A (n x n) and B (m x m).
///
/// B is reduced once to complex Schur form B = U S U^*, and A + S_kk I is
/// factorized once per diagonal entry, so repeated right-hand sides (as in the
/// stationary iteration for the generalized equation) cost only triangular
/// substitutions. A may be dense or sparse.
class SylvesterSolver {
public:
    SylvesterSolver(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);
    SylvesterSolver(const Eigen::SparseMatrix<double>& a, const Eigen::MatrixXd& b);
    ~SylvesterSolver();
    SylvesterSolver(SylvesterSolver&&) noexcept;
    SylvesterSolver& operator=(SylvesterSolver&&) noexcept;

    Eigen::MatrixXd solve(const Eigen::MatrixXd& c) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// X with A X + X B + C = 0.
Eigen::MatrixXd solve_sylvester(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& c);
Eigen::MatrixXd solve_sylvester(const Eigen::SparseMatrix<double>& a, const Eigen::MatrixXd& b,
                                const Eigen::MatrixXd& c);

struct GeneralizedSylvesterSettings {
    double tol = 1e-10;   ///< relative update between sweeps
    int max_sweeps = 200;
};

struct GeneralizedSylvesterResult {
    Eigen::MatrixXd solution;
    int sweeps = 0;
    double relative_residual = 0.0;  ///< ||A X + X Ar^T + sum N X Nh^T + R||_F / ||R||_F
};

/// Stationary iteration for A X + X Ar^T + sum_j N_j X Nhat_j^T + R = 0: each sweep
/// solves the standard equation with the bilinear terms lagged. Throws
/// ConvergenceError when the update does not drop below tol within max_sweeps.
GeneralizedSylvesterResult solve_generalized_sylvester(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ar,
                                                       std::span<const Eigen::MatrixXd> n,
                                                       std::span<const Eigen::MatrixXd> nhat,
                                                       const Eigen::MatrixXd& rhs,
                                                       const GeneralizedSylvesterSettings& settings = {});

GeneralizedSylvesterResult solve_generalized_sylvester(const Eigen::SparseMatrix<double>& a,
                                                       const Eigen::MatrixXd& ar,
                                                       std::span<const Eigen::SparseMatrix<double>> n,
                                                       std::span<const Eigen::MatrixXd> nhat,
                                                       const Eigen::MatrixXd& rhs,
                                                       const GeneralizedSylvesterSettings& settings = {});

} // namespace vfbd::numerics
