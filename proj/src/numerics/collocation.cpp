#include "vfbd/numerics/collocation.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/SparseLU>

namespace vfbd::numerics {

DaeJacobian SemiExplicitDae::jacobian(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const
{
    const Eigen::Index ny = y.size();
    const Eigen::Index nz = z.size();
    Eigen::VectorXd yz(ny + nz);
    yz << y, z;
    auto f = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        Eigen::VectorXd out(ny + nz);
        out << rhs(v.head(ny), v.tail(nz)), constraint(v.head(ny), v.tail(nz));
        return out;
    };
    const Eigen::MatrixXd full = finite_difference_jacobian(f, yz);
    DaeJacobian jac;
    jac.fy = full.topLeftCorner(ny, ny).sparseView();
    jac.fz = full.topRightCorner(ny, nz).sparseView();
    jac.gy = full.bottomLeftCorner(nz, ny).sparseView();
    jac.gz = full.bottomRightCorner(nz, nz).sparseView();
    return jac;
}

DenseDaeJacobian SemiExplicitDae::dense_jacobian(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const
{
    const DaeJacobian j = jacobian(y, z);
    return {Eigen::MatrixXd(j.fy), Eigen::MatrixXd(j.fz), Eigen::MatrixXd(j.gy), Eigen::MatrixXd(j.gz)};
}

Eigen::MatrixXd SemiExplicitDae::constraint_jacobian_z(const Eigen::VectorXd& y, const Eigen::VectorXd& z) const
{
    return Eigen::MatrixXd(jacobian(y, z).gz);
}

namespace {

CollocationScheme scheme_from_nodes(CollocationFamily family, const Eigen::Vector3d& nodes)
{
    // Monomial coefficients of the Lagrange basis: columns of V^{-1}, V_ik = c_i^k.
    Eigen::Matrix3d vander;
    for (int i = 0; i < 3; ++i) {
        for (int k = 0; k < 3; ++k) {
            vander(i, k) = std::pow(nodes(i), k);
        }
    }
    const Eigen::Matrix3d coeff = vander.inverse();  // l_l(s) = sum_k coeff(k, l) s^k

    CollocationScheme s;
    s.family = family;
    s.nodes = nodes;
    for (int l = 0; l < 3; ++l) {
        double w = 0.0;
        double end = 0.0;
        for (int k = 0; k < 3; ++k) {
            w += coeff(k, l) / (k + 1);
            end += coeff(k, l);
        }
        s.weights(l) = w;
        s.end_lagrange(l) = end;
        for (int j = 0; j < 3; ++j) {
            double a = 0.0;
            for (int k = 0; k < 3; ++k) {
                a += coeff(k, l) * std::pow(nodes(j), k + 1) / (k + 1);
            }
            s.coefficients(j, l) = a;
        }
    }
    return s;
}

using Triplets = std::vector<Eigen::Triplet<double>>;

void append_block(Triplets& t, const Eigen::SparseMatrix<double>& m, Eigen::Index row0, Eigen::Index col0,
                  double scale)
{
    if (scale == 0.0) {
        return;
    }
    for (int k = 0; k < m.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
            t.emplace_back(row0 + it.row(), col0 + it.col(), scale * it.value());
        }
    }
}

} // namespace

CollocationScheme CollocationScheme::gauss_legendre()
{
    const double r = std::sqrt(15.0) / 10.0;
    return scheme_from_nodes(CollocationFamily::GaussLegendre, Eigen::Vector3d(0.5 - r, 0.5, 0.5 + r));
}

CollocationScheme CollocationScheme::radau_iia()
{
    const double r = std::sqrt(6.0);
    return scheme_from_nodes(CollocationFamily::RadauIIA, Eigen::Vector3d((4.0 - r) / 10.0, (4.0 + r) / 10.0, 1.0));
}

CollocationScheme CollocationScheme::from_name(const std::string& name)
{
    if (name == "gauss" || name == "legendre" || name == "gauss-legendre") {
        return gauss_legendre();
    }
    if (name == "radau" || name == "radau-iia") {
        return radau_iia();
    }
    throw std::invalid_argument("unknown collocation scheme '" + name + "'");
}

DaeState collocation_step(const SemiExplicitDae& dae, const DaeState& state, double dt,
                          const CollocationScheme& scheme, const CollocationOptions& options)
{
    const Eigen::Index ny = dae.differential_size();
    const Eigen::Index nz = dae.algebraic_size();
    if (state.y.size() != ny || state.z.size() != nz) {
        throw DimensionError("collocation_step: state does not match the DAE dimensions");
    }
    constexpr int stages = 3;
    const Eigen::Index n_total = stages * (ny + nz);
    const auto& a = scheme.coefficients;

    // Unknown layout: [K_1 .. K_3 | Z_1 .. Z_3].
    auto stage_state = [&](const Eigen::VectorXd& u, int j) {
        Eigen::VectorXd yj = state.y;
        for (int l = 0; l < stages; ++l) {
            yj.noalias() += dt * a(j, l) * u.segment(l * ny, ny);
        }
        return yj;
    };
    auto node_alg = [&](const Eigen::VectorXd& u, int j) { return u.segment(stages * ny + j * nz, nz); };

    auto residual = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        Eigen::VectorXd r(n_total);
        for (int j = 0; j < stages; ++j) {
            const Eigen::VectorXd yj = stage_state(u, j);
            const Eigen::VectorXd zj = node_alg(u, j);
            r.segment(j * ny, ny) = u.segment(j * ny, ny) - dae.rhs(yj, zj);
            r.segment(stages * ny + j * nz, nz) = dae.constraint(yj, zj);
        }
        return r;
    };

    auto sparse_jacobian = [&](const Eigen::VectorXd& u) -> Eigen::SparseMatrix<double> {
        Triplets t;
        Eigen::SparseMatrix<double> eye(ny, ny);
        eye.setIdentity();
        for (int j = 0; j < stages; ++j) {
            const DaeJacobian jac = dae.jacobian(stage_state(u, j), node_alg(u, j));
            t.reserve(t.size() + 3 * jac.fy.nonZeros() + ny + jac.fz.nonZeros() + 3 * jac.gy.nonZeros()
                      + jac.gz.nonZeros());
            const Eigen::Index row_k = j * ny;
            const Eigen::Index row_z = stages * ny + j * nz;
            append_block(t, eye, row_k, row_k, 1.0);
            for (int l = 0; l < stages; ++l) {
                append_block(t, jac.fy, row_k, l * ny, -dt * a(j, l));
                append_block(t, jac.gy, row_z, l * ny, dt * a(j, l));
            }
            append_block(t, jac.fz, row_k, stages * ny + j * nz, -1.0);
            append_block(t, jac.gz, row_z, stages * ny + j * nz, 1.0);
        }
        Eigen::SparseMatrix<double> m(n_total, n_total);
        m.setFromTriplets(t.begin(), t.end());
        return m;
    };

    auto dense_jacobian = [&](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_total, n_total);
        for (int j = 0; j < stages; ++j) {
            const DenseDaeJacobian jac = dae.dense_jacobian(stage_state(u, j), node_alg(u, j));
            const Eigen::Index row_k = j * ny;
            const Eigen::Index row_z = stages * ny + j * nz;
            m.block(row_k, row_k, ny, ny).diagonal().array() += 1.0;
            for (int l = 0; l < stages; ++l) {
                m.block(row_k, l * ny, ny, ny).noalias() -= dt * a(j, l) * jac.fy;
                m.block(row_z, l * ny, nz, ny).noalias() += dt * a(j, l) * jac.gy;
            }
            m.block(row_k, stages * ny + j * nz, ny, nz) = -jac.fz;
            m.block(row_z, stages * ny + j * nz, nz, nz) = jac.gz;
        }
        return m;
    };

    Eigen::VectorXd u0(n_total);
    const Eigen::VectorXd f0 = dae.rhs(state.y, state.z);
    for (int j = 0; j < stages; ++j) {
        u0.segment(j * ny, ny) = f0;
        u0.segment(stages * ny + j * nz, nz) = state.z;
    }

    NewtonReport report;
    bool solved = false;
    // Frozen Jacobian at the predictor; contraction is monitored on the step norm.
    // Iterates leaving the model domain hand over to the damped Newton below.
    if (options.simplified_newton) try {
        Eigen::VectorXd u = u0;
        Eigen::VectorXd r = residual(u);
        Eigen::PartialPivLU<Eigen::MatrixXd> dense_lu;
        Eigen::SparseLU<Eigen::SparseMatrix<double>> sparse_lu;
        const bool dense = n_total <= options.dense_threshold;
        const auto factor = [&](const Eigen::VectorXd& at) {
            if (dense) {
                dense_lu.compute(dense_jacobian(at));
                const auto piv = dense_lu.matrixLU().diagonal().cwiseAbs();
                return piv.allFinite() && piv.minCoeff() > 1e-14 * piv.maxCoeff();
            }
            sparse_lu.compute(sparse_jacobian(at));
            return sparse_lu.info() == Eigen::Success;
        };
        bool factored = r.allFinite() && factor(u);
        double prev_step = std::numeric_limits<double>::infinity();
        for (int it = 0; factored && it < options.simplified_max_iterations; ++it) {
            const Eigen::VectorXd du = dense ? Eigen::VectorXd(dense_lu.solve(r)) : Eigen::VectorXd(sparse_lu.solve(r));
            const double step = du.lpNorm<Eigen::Infinity>();
            if (!std::isfinite(step) || step > 0.9 * prev_step) {
                break;
            }
            u -= du;
            r = residual(u);
            if (!r.allFinite()) {
                break;
            }
            const double scale = 1.0 + u.lpNorm<Eigen::Infinity>();
            if (r.lpNorm<Eigen::Infinity>() <= options.newton.abs_tol && step <= options.newton.step_tol * scale) {
                report.solution = std::move(u);
                report.iterations = it + 1;
                report.residual_norm = r.lpNorm<Eigen::Infinity>();
                solved = true;
                break;
            }
            // slow contraction: refresh the Jacobian at the current iterate
            if (step > 0.2 * prev_step) {
                factored = factor(u);
                prev_step = std::numeric_limits<double>::infinity();
            } else {
                prev_step = step;
            }
        }
    } catch (const DomainError&) {
        solved = false;
    } catch (const DegenerateFeedError&) {
        solved = false;
    }
    if (!solved) {
        try {
            if (n_total <= options.dense_threshold) {
                JacobianFn dense = dense_jacobian;
                report = newton_solve(residual, dense, u0, options.newton);
            } else {
                SparseJacobianFn sparse = sparse_jacobian;
                report = newton_solve(residual, sparse, u0, options.newton);
            }
        } catch (const NumericalError& e) {
            std::ostringstream msg;
            msg << "collocation_step (dt=" << dt << ", " << ny << "+" << nz << " states): " << e.what();
            throw CollocationError(msg.str());
        }
    }

    const Eigen::VectorXd& u = report.solution;
    DaeState next;
    next.y = state.y;
    for (int l = 0; l < stages; ++l) {
        next.y.noalias() += dt * scheme.weights(l) * u.segment(l * ny, ny);
    }
    next.z = Eigen::VectorXd::Zero(nz);
    for (int l = 0; l < stages; ++l) {
        next.z.noalias() += scheme.end_lagrange(l) * node_alg(u, l);
    }
    if (options.reconcile_endpoint && nz > 0 && scheme.family != CollocationFamily::RadauIIA) {
        ResidualFn g = [&](const Eigen::VectorXd& z) { return dae.constraint(next.y, z); };
        JacobianFn gz = [&](const Eigen::VectorXd& z) {
            return dae.constraint_jacobian_z(next.y, z);
        };
        try {
            next.z = newton_solve(g, gz, next.z, options.newton).solution;
        } catch (const NumericalError& e) {
            throw CollocationError(std::string("collocation_step: end-point algebraic reconciliation failed: ")
                                   + e.what());
        }
    }
    return next;
}

} // namespace vfbd::numerics
