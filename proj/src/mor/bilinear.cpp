#include "vfbd/mor/bilinear.hpp"

#include <vector>

#include "vfbd/errors.hpp"

namespace vfbd::mor {

Eigen::VectorXd BilinearSystem::rhs(const Eigen::VectorXd& x, const Uhat& uhat) const
{
    Eigen::VectorXd out = A * x + B * uhat;
    for (int i = 0; i < 5; ++i) {
        if (uhat(i) != 0.0 && Q[i].nonZeros() > 0) {
            out += uhat(i) * (Q[i] * x);
        }
    }
    return out;
}

Eigen::SparseMatrix<double> BilinearSystem::state_jacobian(const Uhat& uhat) const
{
    Eigen::SparseMatrix<double> j = A;
    for (int i = 0; i < 5; ++i) {
        if (uhat(i) != 0.0 && Q[i].nonZeros() > 0) {
            j += uhat(i) * Q[i];
        }
    }
    return j;
}

Eigen::Matrix<double, Eigen::Dynamic, 5> BilinearSystem::input_jacobian(const Eigen::VectorXd& x) const
{
    Eigen::Matrix<double, Eigen::Dynamic, 5> j = B;
    for (int i = 0; i < 5; ++i) {
        if (Q[i].nonZeros() > 0) {
            j.col(i) += Q[i] * x;
        }
    }
    return j;
}

Eigen::SparseMatrix<double> BilinearSystem::matricized() const
{
    const Eigen::Index n = order();
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < 5; ++i) {
        for (int k = 0; k < Q[i].outerSize(); ++k) {
            for (Eigen::SparseMatrix<double>::InnerIterator it(Q[i], k); it; ++it) {
                t.emplace_back(it.row(), i * n + it.col(), it.value());
            }
        }
    }
    Eigen::SparseMatrix<double> m(n, 5 * n);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

BilinearSystem build_bilinear_fom(const model::QTensor& q, const model::GridConfig& grid)
{
    const int n = grid.n;
    if (q.b1.size() != n || q.q[0].rows() != n) {
        throw DimensionError("build_bilinear_fom: Q tensor does not match the grid");
    }
    BilinearSystem s;
    s.A.resize(n, n);
    s.A.setIdentity();
    s.A *= -1.0;
    for (int i = 0; i < 4; ++i) {
        s.Q[i] = q.q[i];
    }
    s.Q[4].resize(n, n);
    s.B = Eigen::Matrix<double, Eigen::Dynamic, 5>::Zero(n, 5);
    s.B.col(4) = q.b1;
    s.C = Eigen::RowVectorXd::Zero(n);
    s.C(n - 1) = 1.0;
    return s;
}

RomBasis RomBasis::from_bases(Eigen::MatrixXd V, Eigen::MatrixXd W)
{
    if (V.rows() != W.rows() || V.cols() != W.cols() || V.cols() == 0) {
        throw DimensionError("RomBasis: V and W must have equal non-empty shapes");
    }
    const Eigen::MatrixXd wtv = W.transpose() * V;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(wtv);
    if (!(lu.rcond() > 1e-12)) {
        throw SingularMatrixError("RomBasis: W^T V is numerically singular");
    }
    RomBasis b;
    b.T = lu.solve(W.transpose());
    b.V = std::move(V);
    b.W = std::move(W);
    return b;
}

RomBasis RomBasis::make_identity(Eigen::Index n)
{
    RomBasis b;
    b.V = Eigen::MatrixXd::Identity(n, n);
    b.W = b.V;
    b.T = b.V;
    b.identity = true;
    return b;
}

Eigen::VectorXd RomBasis::project(const Eigen::VectorXd& x1) const
{
    if (x1.size() != full_order()) {
        throw DimensionError("project_state: vector length does not match the basis");
    }
    return identity ? x1 : Eigen::VectorXd(T * x1);
}

Eigen::VectorXd RomBasis::lift(const Eigen::VectorXd& xr) const
{
    if (xr.size() != reduced_order()) {
        throw DimensionError("lift_state: vector length does not match the basis");
    }
    return identity ? xr : Eigen::VectorXd(V * xr);
}

Eigen::VectorXd project_state(const RomBasis& basis, const Eigen::VectorXd& x1) { return basis.project(x1); }
Eigen::VectorXd lift_state(const RomBasis& basis, const Eigen::VectorXd& xr) { return basis.lift(xr); }

Eigen::MatrixXd RomSystem::dense_state_jacobian(const Uhat& uhat) const
{
    Eigen::MatrixXd j = Ar;
    for (int i = 0; i < 5; ++i) {
        if (uhat(i) != 0.0) {
            j += uhat(i) * Qr[i];
        }
    }
    return j;
}

Eigen::VectorXd RomSystem::rhs(const Eigen::VectorXd& x, const Uhat& uhat) const
{
    Eigen::VectorXd y = Br * uhat;
    y.noalias() += Ar * x;
    for (int i = 0; i < 5; ++i) {
        if (uhat(i) != 0.0) {
            y.noalias() += uhat(i) * (Qr[i] * x);
        }
    }
    return y;
}

Eigen::SparseMatrix<double> RomSystem::state_jacobian(const Uhat& uhat) const
{
    return dense_state_jacobian(uhat).sparseView(0.0);
}

Eigen::Matrix<double, Eigen::Dynamic, 5> RomSystem::input_jacobian(const Eigen::VectorXd& x) const
{
    Eigen::Matrix<double, Eigen::Dynamic, 5> j = Br;
    for (int i = 0; i < 5; ++i) {
        j.col(i) += Qr[i] * x;
    }
    return j;
}

Eigen::MatrixXd RomSystem::matricized() const
{
    const Eigen::Index r = order();
    Eigen::MatrixXd m(r, 5 * r);
    for (int i = 0; i < 5; ++i) {
        m.middleCols(i * r, r) = Qr[i];
    }
    return m;
}

RomSystem project_system(const BilinearSystem& fom, const RomBasis& basis)
{
    if (basis.full_order() != fom.order()) {
        throw DimensionError("project_system: basis does not match the full order");
    }
    RomSystem rom;
    if (basis.identity) {
        rom.Ar = Eigen::MatrixXd(fom.A);
        for (int i = 0; i < 5; ++i) {
            rom.Qr[i] = Eigen::MatrixXd(fom.Q[i]);
        }
        rom.Br = fom.B;
        rom.Cr = fom.C;
        return rom;
    }
    rom.Ar = basis.T * (fom.A * basis.V);
    for (int i = 0; i < 5; ++i) {
        rom.Qr[i] = basis.T * (fom.Q[i] * basis.V);
    }
    rom.Br = basis.T * fom.B;
    rom.Cr = fom.C * basis.V;
    return rom;
}

Eigen::VectorXd rom_rhs(const RomSystem& rom, const Eigen::VectorXd& xr, const Uhat& uhat)
{
    if (xr.size() != rom.order()) {
        throw DimensionError("rom_rhs: state length does not match the reduced order");
    }
    return rom.rhs(xr, uhat);
}

} // namespace vfbd::mor
