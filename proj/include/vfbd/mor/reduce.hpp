#pragma once

#include <cstdint>
#include <vector>

#include "vfbd/mor/bilinear.hpp"
#include "vfbd/numerics/sylvester.hpp"

namespace vfbd::mor {

enum class TestBasis {
    Galerkin,        ///< W = V, T = V^T for the returned ROM
    PetrovGalerkin,  ///< W from the adjoint equation
};

struct ReductionSettings {
    int order = 7;
    int max_iterations = 100;
    double eigen_tol = 1e-6;   ///< relative shift of the reduced poles between iterations

    /// Operating point of the augmented input and the typical deviation of each
    /// component around it. The iteration runs on the deviation realization.
    Uhat operating_point = (Uhat() << 0.011, 1e-3, 0.04, -1.0, 0.011 * 0.225).finished();
    Uhat deviation = (Uhat() << 3e-3, 4e-4, 0.02, 0.01, 0.011 * 0.08).finished();

    /// Target bound for sum_j ||gamma N_j||_1; gamma is halved further on divergence.
    double contraction = 0.5;
    TestBasis final_projection = TestBasis::Galerkin;
    numerics::GeneralizedSylvesterSettings sylvester;

    // Fixed validation staircases for the best-iterate selection.
    int validation_signals = 3;
    int validation_steps = 900;
    int level_steps = 75;
    double validation_dt = 2.0;
    std::uint64_t seed = 7;
};

struct ConvergenceRecord {
    int iteration = 0;
    double eigen_shift = 0.0;
    double sampled_error = 0.0;      ///< max pointwise state error on the validation set
    double sampled_rel_mse = 0.0;
    int sweeps_v = 0;
    int sweeps_w = 0;
    double residual_v = 0.0;
    double residual_w = 0.0;
};

struct ReductionResult {
    RomBasis basis;
    RomSystem rom;
    std::vector<ConvergenceRecord> log;
    int best_iteration = 0;
    bool converged = false;     ///< false: best-so-far returned after max_iterations
    double bilinear_weight = 1.0;
    double residual_v = 0.0;    ///< Sylvester residuals at the best iterate
    double residual_w = 0.0;
};

/// H2-type reduction by the generalized Sylvester iteration.
ReductionResult reduce_h2(const BilinearSystem& fom, const ReductionSettings& settings = {});

/// Crank-Nicolson run of a bilinear part under a piecewise constant uhat sequence;
/// column k of the result is the state after k steps.
Eigen::MatrixXd simulate_uhat(const model::BilinearPart& part, const std::vector<Uhat>& uhat,
                              const Eigen::VectorXd& x0, double dt);

/// Seeded staircase of uhat = op + dev .* nu, nu uniform in [-1, 1] per level.
std::vector<Uhat> staircase_uhat(const Uhat& op, const Uhat& dev, int steps, int level_steps, std::uint64_t seed);

} // namespace vfbd::mor
