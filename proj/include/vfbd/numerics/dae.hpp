#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace vfbd::numerics {

/// Partial derivatives of a semi-explicit DAE  y' = f(y, z), 0 = g(y, z).
struct DaeJacobian {
    Eigen::SparseMatrix<double> fy;
    Eigen::SparseMatrix<double> fz;
    Eigen::SparseMatrix<double> gy;
    Eigen::SparseMatrix<double> gz;
};

/// The same blocks as dense matrices, for small systems.
struct DenseDaeJacobian {
    Eigen::MatrixXd fy;
    Eigen::MatrixXd fz;
    Eigen::MatrixXd gy;
    Eigen::MatrixXd gz;
};

/// Semi-explicit index-1 DAE with inputs frozen over the current step.
class SemiExplicitDae {
public:
    virtual ~SemiExplicitDae() = default;

    virtual Eigen::Index differential_size() const = 0;
    virtual Eigen::Index algebraic_size() const = 0;
    virtual Eigen::VectorXd rhs(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const = 0;
    virtual Eigen::VectorXd constraint(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const = 0;

    /// Defaults to dense central differences; override with structure where it exists.
    virtual DaeJacobian jacobian(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const;
    /// Densified jacobian() unless overridden.
    virtual DenseDaeJacobian dense_jacobian(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const;

    /// dg/dz alone; used when only the algebraic variables are re-solved.
    virtual Eigen::MatrixXd constraint_jacobian_z(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const;
};

struct DaeState {
    Eigen::VectorXd y;
    Eigen::VectorXd z;
};

} // namespace vfbd::numerics
