#pragma once

#include <memory>

#include "vfbd/model/dryer_model.hpp"
#include "vfbd/model/gpr.hpp"

namespace support {

inline vfbd::model::DryerModel default_model(int n)
{
    using namespace vfbd::model;
    return DryerModel(make_grid(n, 1.0), PhysicalParams{}, fit_gpr_set(synthetic_gpr_training()));
}

} // namespace support
