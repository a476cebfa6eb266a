#include "vfbd/model/dryer_dae.hpp"

#include <cmath>
#include <vector>

#include "vfbd/errors.hpp"

namespace vfbd::model {

DryerDae::DryerDae(const BilinearPart& part, const DryerModel& model, const PlantInputs& u, const Disturbances& w)
    : part_(part), model_(model), u_(u), w_(w), coeff_(model.coefficients(u))
{
}

Eigen::Matrix<double, 6, 1> DryerDae::augmented(double m_h, double eps, double T_s) const
{
    Eigen::Matrix<double, 6, 1> a;
    a.head<5>() = model_.uhat(m_h, eps, T_s, coeff_, u_, w_);
    a(5) = model_.holdup_rate(m_h, eps, coeff_, w_);
    return a;
}

Eigen::Matrix<double, 6, 3> DryerDae::augmented_jacobian(double m_h, double eps, double T_s) const
{
    Eigen::Matrix<double, 6, 3> j;
    const double x[3] = {m_h, eps, T_s};
    for (int k = 0; k < 3; ++k) {
        double xp[3] = {x[0], x[1], x[2]};
        double xm[3] = {x[0], x[1], x[2]};
        // Keep the porosity perturbation inside (0, 1) near the bounds.
        double h = 1e-6 * std::max(1.0, std::abs(x[k]));
        if (k == 0) {
            h = std::min(h, 0.5 * m_h);
        } else if (k == 1) {
            h = std::min({h, 0.5 * eps, 0.5 * (1.0 - eps)});
        }
        xp[k] += h;
        xm[k] -= h;
        j.col(k) = (augmented(xp[0], xp[1], xp[2]) - augmented(xm[0], xm[1], xm[2])) / (2.0 * h);
    }
    return j;
}

Eigen::VectorXd DryerDae::rhs(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const
{
    const Eigen::Index n = part_.order();
    const Eigen::Matrix<double, 6, 1> a = augmented(y(n), z(0), z(1));
    Eigen::VectorXd out(n + 1);
    out.head(n) = part_.rhs(y.head(n), a.head<5>());
    out(n) = a(5);
    return out;
}

Eigen::VectorXd DryerDae::constraint(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const
{
    return model_.constraints().residual(y(part_.order()), z(0), z(1), u_, w_);
}

Eigen::MatrixXd DryerDae::constraint_jacobian_z(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const
{
    return model_.constraints().jacobian(y(part_.order()), z(0), z(1), u_, w_).rightCols<2>();
}

numerics::DaeJacobian DryerDae::jacobian(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const
{
    const Eigen::Index n = part_.order();
    const Eigen::VectorXd x = y.head(n);
    const double m_h = y(n);
    const Eigen::Matrix<double, 6, 1> a = augmented(m_h, z(0), z(1));
    const Eigen::Matrix<double, 6, 3> da = augmented_jacobian(m_h, z(0), z(1));
    const Eigen::Matrix<double, Eigen::Dynamic, 5> bu = part_.input_jacobian(x);
    const Eigen::MatrixXd chain = bu * da.topRows<5>();   // n x 3
    const Eigen::Matrix<double, 2, 3> gj = model_.constraints().jacobian(m_h, z(0), z(1), u_, w_);

    using T = Eigen::Triplet<double>;
    const Eigen::SparseMatrix<double> sx = part_.state_jacobian(a.head<5>());
    std::vector<T> fy;
    fy.reserve(sx.nonZeros() + n + 1);
    for (int k = 0; k < sx.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(sx, k); it; ++it) {
            fy.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        if (chain(i, 0) != 0.0) {
            fy.emplace_back(i, n, chain(i, 0));
        }
    }
    fy.emplace_back(n, n, da(5, 0));

    numerics::DaeJacobian jac;
    jac.fy.resize(n + 1, n + 1);
    jac.fy.setFromTriplets(fy.begin(), fy.end());

    Eigen::MatrixXd fz(n + 1, 2);
    fz.topRows(n) = chain.rightCols<2>();
    fz.row(n) = da.block<1, 2>(5, 1);
    jac.fz = fz.sparseView(0.0);

    Eigen::MatrixXd gy = Eigen::MatrixXd::Zero(2, n + 1);
    gy.col(n) = gj.col(0);
    jac.gy = gy.sparseView(0.0);
    jac.gz = Eigen::MatrixXd(gj.rightCols<2>()).sparseView(0.0);
    return jac;
}

numerics::DenseDaeJacobian DryerDae::dense_jacobian(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const
{
    const Eigen::Index n = part_.order();
    const double m_h = y(n);
    const Eigen::Matrix<double, 6, 1> a = augmented(m_h, z(0), z(1));
    const Eigen::Matrix<double, 6, 3> da = augmented_jacobian(m_h, z(0), z(1));
    const Eigen::MatrixXd chain = part_.input_jacobian(y.head(n)) * da.topRows<5>();
    const Eigen::Matrix<double, 2, 3> gj = model_.constraints().jacobian(m_h, z(0), z(1), u_, w_);

    numerics::DenseDaeJacobian jac;
    jac.fy = Eigen::MatrixXd::Zero(n + 1, n + 1);
    jac.fy.topLeftCorner(n, n) = part_.dense_state_jacobian(a.head<5>());
    jac.fy.col(n).head(n) = chain.col(0);
    jac.fy(n, n) = da(5, 0);
    jac.fz.resize(n + 1, 2);
    jac.fz.topRows(n) = chain.rightCols<2>();
    jac.fz.row(n) = da.block<1, 2>(5, 1);
    jac.gy = Eigen::MatrixXd::Zero(2, n + 1);
    jac.gy.col(n) = gj.col(0);
    jac.gz = gj.rightCols<2>();
    return jac;
}

} // namespace vfbd::model
