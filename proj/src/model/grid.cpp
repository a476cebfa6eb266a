#include <cmath>
#include <stdexcept>
#include <string>

#include "vfbd/errors.hpp"
#include "vfbd/model/types.hpp"

namespace vfbd::model {

GridConfig make_grid(int n, double length)
{
    if (n < 2) {
        throw DimensionError("make_grid: need at least 2 grid points, got " + std::to_string(n));
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw std::invalid_argument("make_grid: bed length must be positive");
    }
    return {n, length, length / n};
}

void PhysicalParams::validate() const
{
    const std::pair<const char*, double> entries[] = {
        {"k_d1", k_d1}, {"rho_s", rho_s}, {"rho_a", rho_a}, {"mu_a", mu_a},   {"d_p", d_p},
        {"A_bed", A_bed}, {"c_pa", c_pa}, {"dh_v", dh_v},   {"P_a", P_a},     {"g", g},
        {"lambda_phi", lambda_phi}};
    for (const auto& [name, value] : entries) {
        if (!(value > 0.0) || !std::isfinite(value)) {
            throw std::invalid_argument(std::string("physical parameter ") + name + " must be positive");
        }
    }
}

} // namespace vfbd::model
