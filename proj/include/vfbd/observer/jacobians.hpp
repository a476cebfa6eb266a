#pragma once

#include <Eigen/Dense>

#include "vfbd/model/bilinear_part.hpp"
#include "vfbd/model/dryer_model.hpp"
#include "vfbd/mor/bilinear.hpp"

namespace vfbd::observer {

/// Linearization of eta' = f(eta, z), 0 = g(eta, z) with eta = [x; m_h], z = [eps; T_s].
struct JacobianSet {
    Eigen::MatrixXd J1;   ///< (r+1) x (r+1)
    Eigen::MatrixXd J2;   ///< (r+1) x 2
    Eigen::MatrixXd J3;   ///< 2 x (r+1)
    Eigen::MatrixXd J4;   ///< 2 x 2

    /// J4^-1 M; SingularMatrixError when cond(J4) exceeds the limit.
    Eigen::MatrixXd j4_solve(const Eigen::MatrixXd& m, double condition_limit = 1e12) const;
};

/// Bilinear block exact, u-hat chain terms by central differences, constraint blocks analytic.
JacobianSet assemble_jacobians(const Eigen::VectorXd& eta, const Eigen::Vector2d& z, const model::PlantInputs& u,
                               const model::Disturbances& w, const model::BilinearPart& part,
                               const model::DryerModel& model, double condition_limit = 1e12);

/// J1 - J2 J4^-1 J3.
Eigen::MatrixXd build_al1(const JacobianSet& j, double condition_limit = 1e12);
/// [[J1, J2], [-J4^-1 J3 J1, -J4^-1 J3 J2]].
Eigen::MatrixXd build_al2(const JacobianSet& j, double condition_limit = 1e12);

/// Gamma = blockdiag(T, I3) and GammaInv = blockdiag(V, I3), materialized.
struct ProjectionPair {
    Eigen::MatrixXd Gamma;
    Eigen::MatrixXd GammaInv;

    static ProjectionPair from_basis(const mor::RomBasis& basis);
};

} // namespace vfbd::observer
