#pragma once

#include <Eigen/Dense>

#include "vfbd/mor/bilinear.hpp"
#include "vfbd/observer/jacobians.hpp"

namespace vfbd::observer {

/// expm(A_L dt); DimensionCapError above the cap.
Eigen::MatrixXd transition_matrix(const Eigen::MatrixXd& a_l, double dt, Eigen::Index cap = 400);

/// Psi blockdiag(T,1) diag(omega) blockdiag(V,1) Psi^T with Psi = [I; +-J4^-1 J3].
Eigen::MatrixXd noise_matrix(const Eigen::VectorXd& omega, const mor::RomBasis& basis, const JacobianSet& j,
                             bool negate_psi = false, double condition_limit = 1e12);

/// Upper-left (r+1) block of the noise matrix (no algebraic rows).
Eigen::MatrixXd differential_noise(const Eigen::VectorXd& omega, const mor::RomBasis& basis);

/// Gamma x and GammaInv xh without forming Gamma.
Eigen::VectorXd project_estimate(const mor::RomBasis& basis, const Eigen::VectorXd& x);
Eigen::VectorXd lift_estimate(const mor::RomBasis& basis, const Eigen::VectorXd& xh);

/// Gamma P GammaInv and GammaInv Ph Gamma, blockwise.
Eigen::MatrixXd project_covariance(const mor::RomBasis& basis, const Eigen::MatrixXd& p);
Eigen::MatrixXd lift_covariance(const mor::RomBasis& basis, const Eigen::MatrixXd& ph);

/// ||P - P^T||_inf.
double asymmetry(const Eigen::MatrixXd& p);

} // namespace vfbd::observer
