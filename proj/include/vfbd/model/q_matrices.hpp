#pragma once

#include <array>

#include <Eigen/Sparse>

#include "vfbd/model/types.hpp"

namespace vfbd::model {

/// Frontal slices of the bilinear tensor; the fifth slice is identically zero.
struct QTensor {
    std::array<Eigen::SparseMatrix<double>, 4> q;
    Eigen::VectorXd b1;
};

/// exp(-z / lambda_phi).
double drying_profile(double z, double lambda_phi);

QTensor assemble_q_matrices(const GridConfig& grid, const PhysicalParams& params);

} // namespace vfbd::model
