#include "vfbd/observer/covariance.hpp"

#include "vfbd/errors.hpp"
#include "vfbd/numerics/expm.hpp"

namespace vfbd::observer {

Eigen::MatrixXd transition_matrix(const Eigen::MatrixXd& a_l, double dt, Eigen::Index cap)
{
    return numerics::matrix_exponential(a_l, dt, cap);
}

Eigen::MatrixXd differential_noise(const Eigen::VectorXd& omega, const mor::RomBasis& basis)
{
    const Eigen::Index n = basis.full_order();
    const Eigen::Index r = basis.reduced_order();
    if (omega.size() != n + 1) {
        throw DimensionError("noise_matrix: omega must have N + 1 entries");
    }
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(r + 1, r + 1);
    if (basis.identity) {
        q.topLeftCorner(n, n) = omega.head(n).asDiagonal();
    } else if ((omega.head(n).array() == omega(0)).all()) {
        q.topLeftCorner(r, r).diagonal().setConstant(omega(0));   // T V = I
    } else {
        q.topLeftCorner(r, r) = basis.T * omega.head(n).asDiagonal() * basis.V;
    }
    q(r, r) = omega(n);
    return q;
}

Eigen::MatrixXd noise_matrix(const Eigen::VectorXd& omega, const mor::RomBasis& basis, const JacobianSet& j,
                             bool negate_psi, double condition_limit)
{
    const Eigen::MatrixXd q = differential_noise(omega, basis);
    const Eigen::Index m = q.rows();
    if (j.J3.cols() != m) {
        throw DimensionError("noise_matrix: Jacobians do not match the basis");
    }
    Eigen::MatrixXd low = j.j4_solve(j.J3, condition_limit);
    if (negate_psi) {
        low = -low;
    }
    Eigen::MatrixXd out(m + 2, m + 2);
    const Eigen::MatrixXd ql = q * low.transpose();
    out.topLeftCorner(m, m) = q;
    out.topRightCorner(m, 2) = ql;
    out.bottomLeftCorner(2, m) = low * q;
    out.bottomRightCorner(2, 2) = low * ql;
    return out;
}

Eigen::VectorXd project_estimate(const mor::RomBasis& basis, const Eigen::VectorXd& x)
{
    const Eigen::Index n = basis.full_order();
    if (x.size() != n + 3) {
        throw DimensionError("project_estimate: state must have N + 3 entries");
    }
    const Eigen::Index r = basis.reduced_order();
    Eigen::VectorXd xh(r + 3);
    xh.head(r) = basis.project(x.head(n));
    xh.tail(3) = x.tail(3);
    return xh;
}

Eigen::VectorXd lift_estimate(const mor::RomBasis& basis, const Eigen::VectorXd& xh)
{
    const Eigen::Index r = basis.reduced_order();
    if (xh.size() != r + 3) {
        throw DimensionError("lift_estimate: state must have r + 3 entries");
    }
    const Eigen::Index n = basis.full_order();
    Eigen::VectorXd x(n + 3);
    x.head(n) = basis.lift(xh.head(r));
    x.tail(3) = xh.tail(3);
    return x;
}

Eigen::MatrixXd project_covariance(const mor::RomBasis& basis, const Eigen::MatrixXd& p)
{
    const Eigen::Index n = basis.full_order();
    if (p.rows() != n + 3 || p.cols() != n + 3) {
        throw DimensionError("project_covariance: covariance must be (N+3) x (N+3)");
    }
    if (basis.identity) {
        return p;
    }
    const Eigen::Index r = basis.reduced_order();
    Eigen::MatrixXd ph(r + 3, r + 3);
    ph.topLeftCorner(r, r) = (basis.T * p.topLeftCorner(n, n)) * basis.V;
    ph.topRightCorner(r, 3) = basis.T * p.topRightCorner(n, 3);
    ph.bottomLeftCorner(3, r) = p.bottomLeftCorner(3, n) * basis.V;
    ph.bottomRightCorner(3, 3) = p.bottomRightCorner(3, 3);
    return ph;
}

Eigen::MatrixXd lift_covariance(const mor::RomBasis& basis, const Eigen::MatrixXd& ph)
{
    const Eigen::Index r = basis.reduced_order();
    if (ph.rows() != r + 3 || ph.cols() != r + 3) {
        throw DimensionError("lift_covariance: covariance must be (r+3) x (r+3)");
    }
    if (basis.identity) {
        return ph;
    }
    const Eigen::Index n = basis.full_order();
    Eigen::MatrixXd p(n + 3, n + 3);
    p.topLeftCorner(n, n).noalias() = (basis.V * ph.topLeftCorner(r, r)) * basis.T;
    p.topRightCorner(n, 3) = basis.V * ph.topRightCorner(r, 3);
    p.bottomLeftCorner(3, n) = ph.bottomLeftCorner(3, r) * basis.T;
    p.bottomRightCorner(3, 3) = ph.bottomRightCorner(3, 3);
    return p;
}

double asymmetry(const Eigen::MatrixXd& p)
{
    if (p.size() == 0) {
        return 0.0;
    }
    return (p - p.transpose()).cwiseAbs().rowwise().sum().maxCoeff();
}

} // namespace vfbd::observer
