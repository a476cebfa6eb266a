#include "vfbd/observer/jacobians.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "vfbd/errors.hpp"
#include "vfbd/model/dryer_dae.hpp"

namespace vfbd::observer {

namespace {

// 2-norm condition number; closed form for the 2 x 2 case.
double condition_number(const Eigen::MatrixXd& a)
{
    if (a.rows() == 2 && a.cols() == 2) {
        const double fro2 = a.squaredNorm();
        const double det = std::abs(a.determinant());
        const double disc = std::sqrt(std::max(0.0, fro2 * fro2 - 4.0 * det * det));
        const double s_max = std::sqrt(0.5 * (fro2 + disc));
        const double s_min = s_max > 0.0 ? det / s_max : 0.0;
        return s_min > 0.0 ? s_max / s_min : std::numeric_limits<double>::infinity();
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const auto& s = svd.singularValues();
    return s(s.size() - 1) > 0.0 ? s(0) / s(s.size() - 1) : std::numeric_limits<double>::infinity();
}

} // namespace

Eigen::MatrixXd JacobianSet::j4_solve(const Eigen::MatrixXd& m, double condition_limit) const
{
    const double cond = condition_number(J4);
    if (!(cond <= condition_limit)) {
        std::ostringstream msg;
        msg << "J4 is singular (condition " << cond << ")";
        throw SingularMatrixError(msg.str());
    }
    return J4.partialPivLu().solve(m);
}

JacobianSet assemble_jacobians(const Eigen::VectorXd& eta, const Eigen::Vector2d& z, const model::PlantInputs& u,
                               const model::Disturbances& w, const model::BilinearPart& part,
                               const model::DryerModel& model, double condition_limit)
{
    if (eta.size() != part.order() + 1) {
        throw DimensionError("assemble_jacobians: eta must have order + 1 entries");
    }
    const model::DryerDae dae(part, model, u, w);
    numerics::DenseDaeJacobian d = dae.dense_jacobian(eta, z);
    JacobianSet j;
    j.J1 = std::move(d.fy);
    j.J2 = std::move(d.fz);
    j.J3 = std::move(d.gy);
    j.J4 = std::move(d.gz);
    j.j4_solve(Eigen::Matrix2d::Identity(), condition_limit);
    return j;
}

Eigen::MatrixXd build_al1(const JacobianSet& j, double condition_limit)
{
    return j.J1 - j.J2 * j.j4_solve(j.J3, condition_limit);
}

Eigen::MatrixXd build_al2(const JacobianSet& j, double condition_limit)
{
    const Eigen::Index m = j.J1.rows();
    const Eigen::MatrixXd s = j.j4_solve(j.J3, condition_limit);
    Eigen::MatrixXd a(m + 2, m + 2);
    a.topLeftCorner(m, m) = j.J1;
    a.topRightCorner(m, 2) = j.J2;
    a.bottomLeftCorner(2, m) = -s * j.J1;
    a.bottomRightCorner(2, 2) = -s * j.J2;
    return a;
}

ProjectionPair ProjectionPair::from_basis(const mor::RomBasis& basis)
{
    const Eigen::Index n = basis.full_order();
    const Eigen::Index r = basis.reduced_order();
    ProjectionPair p;
    p.Gamma = Eigen::MatrixXd::Zero(r + 3, n + 3);
    p.Gamma.topLeftCorner(r, n) = basis.T;
    p.Gamma.bottomRightCorner(3, 3).setIdentity();
    p.GammaInv = Eigen::MatrixXd::Zero(n + 3, r + 3);
    p.GammaInv.topLeftCorner(n, r) = basis.V;
    p.GammaInv.bottomRightCorner(3, 3).setIdentity();
    return p;
}

} // namespace vfbd::observer
