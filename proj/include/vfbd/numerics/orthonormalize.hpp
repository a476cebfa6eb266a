#pragma once

#include <Eigen/Dense>

namespace vfbd::numerics {

/// Orthonormal basis of span(v) from a thin Householder QR, with the sign of each
/// column fixed so that R has a positive diagonal. Throws NumericalError when
/// v is numerically rank deficient (|R_kk| <= rank_tol * |R_00|).
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& v, double rank_tol = 1e-12);

/// max |V^T V - I|.
double orthonormality_defect(const Eigen::MatrixXd& v);

} // namespace vfbd::numerics
