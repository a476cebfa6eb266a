#pragma once

#include <Eigen/Dense>

#include "vfbd/errors.hpp"

namespace vfbd::numerics {

/// Default guard on the matrix dimension handed to matrix_exponential.
inline constexpr Eigen::Index kDefaultExpmCap = 400;

/// Thrown when the requested exponential exceeds the configured dimension cap.
class DimensionCapError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// exp(M * dt) by scaling and squaring with a [m/m] Pade approximant, m in {3, 5, 7, 9, 13}.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m, double dt, Eigen::Index cap = kDefaultExpmCap);

} // namespace vfbd::numerics
