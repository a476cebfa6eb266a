#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "vfbd/model/types.hpp"

namespace vfbd::model {

/// The moisture part x' = A x + sum_i uhat_i Q_i x + B uhat, y = C x, in either
/// full or reduced coordinates. Lets the DAE and the simulator treat FOM and ROM alike.
class BilinearPart {
public:
    virtual ~BilinearPart() = default;

    virtual Eigen::Index order() const = 0;
    virtual Eigen::VectorXd rhs(const Eigen::VectorXd& x, const Uhat& uhat) const = 0;
    /// A + sum_i uhat_i Q_i.
    virtual Eigen::SparseMatrix<double> state_jacobian(const Uhat& uhat) const = 0;
    virtual Eigen::MatrixXd dense_state_jacobian(const Uhat& uhat) const
    {
        return Eigen::MatrixXd(state_jacobian(uhat));
    }
    /// d rhs / d uhat = [Q_1 x, ..., Q_4 x, Q_5 x] + B  (order x 5).
    virtual Eigen::Matrix<double, Eigen::Dynamic, 5> input_jacobian(const Eigen::VectorXd& x) const = 0;
    virtual double output(const Eigen::VectorXd& x) const = 0;
    /// Output row C (1 x order).
    virtual Eigen::RowVectorXd output_row() const = 0;
};

} // namespace vfbd::model
