#include "vfbd/numerics/orthonormalize.hpp"

#include <cmath>
#include <sstream>

#include "vfbd/errors.hpp"

namespace vfbd::numerics {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& v, double rank_tol)
{
    const Eigen::Index n = v.rows();
    const Eigen::Index r = v.cols();
    if (r > n) {
        throw DimensionError("orthonormalize: more columns than rows");
    }
    if (r == 0) {
        return Eigen::MatrixXd(n, 0);
    }
    if (!v.allFinite()) {
        throw NumericalError("orthonormalize: non-finite basis entries");
    }
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(v);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, r);
    const Eigen::MatrixXd rr = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    const double lead = std::abs(rr(0, 0));
    for (Eigen::Index k = 0; k < r; ++k) {
        const double d = rr(k, k);
        if (!(std::abs(d) > rank_tol * lead) || lead == 0.0) {
            std::ostringstream msg;
            msg << "orthonormalize: basis is rank deficient at column " << k;
            throw NumericalError(msg.str());
        }
        if (d < 0.0) {
            q.col(k) *= -1.0;
        }
    }
    return q;
}

double orthonormality_defect(const Eigen::MatrixXd& v)
{
    if (v.cols() == 0) {
        return 0.0;
    }
    return (v.transpose() * v - Eigen::MatrixXd::Identity(v.cols(), v.cols())).cwiseAbs().maxCoeff();
}

} // namespace vfbd::numerics
