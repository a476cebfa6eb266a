#pragma once

#include <array>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "vfbd/model/bilinear_part.hpp"
#include "vfbd/model/q_matrices.hpp"

namespace vfbd::mor {

using model::Uhat;

/// x' = A x + sum_{i=1..5} uhat_i Q_i x + B uhat,  y = C x  with sparse matrices.
class BilinearSystem final : public model::BilinearPart {
public:
    Eigen::SparseMatrix<double> A;
    std::array<Eigen::SparseMatrix<double>, 5> Q;
    Eigen::Matrix<double, Eigen::Dynamic, 5> B;
    Eigen::RowVectorXd C;

    Eigen::Index order() const override { return A.rows(); }
    Eigen::VectorXd rhs(const Eigen::VectorXd& x, const Uhat& uhat) const override;
    Eigen::SparseMatrix<double> state_jacobian(const Uhat& uhat) const override;
    Eigen::Matrix<double, Eigen::Dynamic, 5> input_jacobian(const Eigen::VectorXd& x) const override;
    double output(const Eigen::VectorXd& x) const override { return C.dot(x); }
    Eigen::RowVectorXd output_row() const override { return C; }

    /// Mode-1 matricization [Q_1, ..., Q_5] (n x 5n).
    Eigen::SparseMatrix<double> matricized() const;
};

/// A = -I, slices [Q_1..Q_4, 0], B = [0, 0, 0, 0, b1], C = e_N^T.
BilinearSystem build_bilinear_fom(const model::QTensor& q, const model::GridConfig& grid);

/// Trial basis V, test basis W and left transform T = (W^T V)^{-1} W^T.
struct RomBasis {
    Eigen::MatrixXd V;
    Eigen::MatrixXd W;
    Eigen::MatrixXd T;
    bool identity = false;   ///< V = W = T = I; products are skipped

    /// Builds T from V and W; SingularMatrixError when W^T V is rank deficient.
    static RomBasis from_bases(Eigen::MatrixXd V, Eigen::MatrixXd W);
    static RomBasis make_identity(Eigen::Index n);

    Eigen::Index full_order() const { return V.rows(); }
    Eigen::Index reduced_order() const { return V.cols(); }

    Eigen::VectorXd project(const Eigen::VectorXd& x1) const;
    Eigen::VectorXd lift(const Eigen::VectorXd& xr) const;
};

/// Dense reduced system x_r' = Ar x_r + sum_i uhat_i Qr_i x_r + Br uhat,  y = Cr x_r.
class RomSystem final : public model::BilinearPart {
public:
    Eigen::MatrixXd Ar;
    std::array<Eigen::MatrixXd, 5> Qr;
    Eigen::Matrix<double, Eigen::Dynamic, 5> Br;
    Eigen::RowVectorXd Cr;

    Eigen::Index order() const override { return Ar.rows(); }
    Eigen::VectorXd rhs(const Eigen::VectorXd& x, const Uhat& uhat) const override;
    Eigen::SparseMatrix<double> state_jacobian(const Uhat& uhat) const override;
    Eigen::Matrix<double, Eigen::Dynamic, 5> input_jacobian(const Eigen::VectorXd& x) const override;
    double output(const Eigen::VectorXd& x) const override { return Cr.dot(x); }
    Eigen::RowVectorXd output_row() const override { return Cr; }

    /// Ar + sum_i uhat_i Qr_i as a dense matrix.
    Eigen::MatrixXd dense_state_jacobian(const Uhat& uhat) const override;
    /// [Qr_1, ..., Qr_5] (r x 5r).
    Eigen::MatrixXd matricized() const;
};

/// Ar = T A V, Qr_i = T Q_i V, Br = T B, Cr = C V.
RomSystem project_system(const BilinearSystem& fom, const RomBasis& basis);

Eigen::VectorXd project_state(const RomBasis& basis, const Eigen::VectorXd& x1);
Eigen::VectorXd lift_state(const RomBasis& basis, const Eigen::VectorXd& xr);
Eigen::VectorXd rom_rhs(const RomSystem& rom, const Eigen::VectorXd& xr, const Uhat& uhat);

} // namespace vfbd::mor
