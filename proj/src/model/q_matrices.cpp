#include "vfbd/model/q_matrices.hpp"

#include <cmath>
#include <vector>

#include "vfbd/errors.hpp"

namespace vfbd::model {

double drying_profile(double z, double lambda_phi)
{
    return std::exp(-z / lambda_phi);
}

QTensor assemble_q_matrices(const GridConfig& grid, const PhysicalParams& params)
{
    const int n = grid.n;
    if (n < 2) {
        throw DimensionError("assemble_q_matrices: need at least 2 grid points");
    }
    const double dz = grid.dz;
    using T = Eigen::Triplet<double>;

    std::vector<T> t1;
    std::vector<T> t2;
    std::vector<T> t3;
    std::vector<T> t4;
    t1.reserve(2 * n);
    t2.reserve(3 * n);
    for (int i = 0; i < n; ++i) {
        t1.emplace_back(i, i, -1.0 / dz);
        if (i > 0) {
            t1.emplace_back(i, i - 1, 1.0 / dz);
            t2.emplace_back(i, i - 1, 1.0 / (dz * dz));
        }
        if (i + 1 < n) {
            t2.emplace_back(i, i + 1, 1.0 / (dz * dz));
        }
        const bool corner = i == 0 || i == n - 1;
        t2.emplace_back(i, i, (corner ? -1.0 : -2.0) / (dz * dz));
        t3.emplace_back(i, i, -drying_profile(i * dz, params.lambda_phi));
        t4.emplace_back(i, i, -1.0);
    }

    QTensor out;
    const std::vector<T>* lists[] = {&t1, &t2, &t3, &t4};
    for (int s = 0; s < 4; ++s) {
        out.q[s].resize(n, n);
        out.q[s].setFromTriplets(lists[s]->begin(), lists[s]->end());
        out.q[s].makeCompressed();
    }
    out.b1 = Eigen::VectorXd::Zero(n);
    out.b1(0) = 1.0 / dz;
    return out;
}

} // namespace vfbd::model
