#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vfbd/model/types.hpp"

namespace vfbd::model {

/// Squared-exponential kernel settings for one coefficient map over theta = (mdot_a, a_vib).
struct GprHyper {
    Eigen::Vector2d length_scales{0.02, 0.8};
    double signal_variance = 1.0;
    double noise_variance = 0.0;
    double prior_mean = 0.0;
    double floor = 1e-8;   ///< predictions are clamped from below
};

class GprModel {
public:
    GprModel() = default;

    /// Solves (K + noise I) alpha = y - prior_mean. Throws SingularMatrixError when the
    /// regularized kernel matrix is not numerically positive definite.
    static GprModel fit(const Eigen::MatrixX2d& inputs, const Eigen::VectorXd& targets, const GprHyper& hyper);

    /// Posterior mean, clamped at the floor.
    double predict(const Eigen::Vector2d& theta) const;
    /// Posterior mean without the floor.
    double predict_raw(const Eigen::Vector2d& theta) const;

    double kernel(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const;
    const Eigen::VectorXd& weights() const { return alpha_; }
    const GprHyper& hyper() const { return hyper_; }
    bool fitted() const { return alpha_.size() > 0; }
    /// Bounding box of the training inputs.
    Eigen::Vector2d input_min() const { return inputs_.colwise().minCoeff().transpose(); }
    Eigen::Vector2d input_max() const { return inputs_.colwise().maxCoeff().transpose(); }

private:
    Eigen::MatrixX2d inputs_;
    Eigen::VectorXd alpha_;
    GprHyper hyper_;
};

/// Training rows: theta plus the three coefficient targets.
struct GprTrainingSet {
    Eigen::MatrixX2d theta;  ///< columns mdot_a, a_vib
    Eigen::VectorXd v;
    Eigen::VectorXd D;
    Eigen::VectorXd zeta;
};

/// The three independent maps theta -> (v, D, zeta).
struct GprSet {
    GprModel v;
    GprModel D;
    GprModel zeta;

    Coefficients predict(const PlantInputs& u) const;
};

struct GprHyperSet {
    GprHyper v{{0.02, 0.8}, 1.2e-4, 1.2e-10, 0.0, 1e-8};
    GprHyper D{{0.02, 0.8}, 1.0e-6, 1.0e-12, 0.0, 1e-8};
    GprHyper zeta{{0.02, 0.8}, 2.5e-4, 2.5e-10, 0.0, 1e-8};
};

GprSet fit_gpr_set(const GprTrainingSet& data, const GprHyperSet& hyper = {});

/// Reads a CSV with header mdot_a,a_vib,v,D,zeta (column order free).
GprTrainingSet load_gpr_training(const std::string& path);
void save_gpr_training(const GprTrainingSet& data, const std::string& path);

/// Smooth positive reference maps used to generate training data.
Coefficients reference_coefficients(double mdot_a, double a_vib);

/// Samples reference_coefficients on a grid over the default envelope
/// mdot_a in [0.03, 0.05], a_vib in [0.6, 1.4].
GprTrainingSet synthetic_gpr_training(int points_per_axis = 5, double mdot_lo = 0.03, double mdot_hi = 0.05,
                                      double avib_lo = 0.6, double avib_hi = 1.4);

} // namespace vfbd::model
