#include "vfbd/mor/reduce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include "vfbd/errors.hpp"
#include "vfbd/numerics/orthonormalize.hpp"

namespace vfbd::mor {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;

namespace {

double sparse_norm1(const SpMat& m)
{
    double best = 0.0;
    for (int k = 0; k < m.outerSize(); ++k) {
        double col = 0.0;
        for (SpMat::InnerIterator it(m, k); it; ++it) {
            col += std::abs(it.value());
        }
        best = std::max(best, col);
    }
    return best;
}

Eigen::VectorXcd sorted_eigenvalues(const MatrixXd& m)
{
    Eigen::VectorXcd ev = Eigen::EigenSolver<MatrixXd>(m, false).eigenvalues();
    std::sort(ev.data(), ev.data() + ev.size(), [](const std::complex<double>& a, const std::complex<double>& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return ev;
}

/// Left singular vectors of the column-normalized block [cols].
MatrixXd dominant_directions(const std::vector<VectorXd>& cols, Eigen::Index n, int r)
{
    MatrixXd k(n, static_cast<Eigen::Index>(cols.size()));
    Eigen::Index used = 0;
    for (const auto& c : cols) {
        const double nrm = c.norm();
        if (nrm > 0.0 && std::isfinite(nrm)) {
            k.col(used++) = c / nrm;
        }
    }
    if (used < r) {
        throw NumericalError("reduce_h2: initial subspace has fewer directions than the requested order");
    }
    Eigen::BDCSVD<MatrixXd> svd(k.leftCols(used), Eigen::ComputeThinU);
    return numerics::orthonormalize(svd.matrixU().leftCols(r));
}

struct ValidationSet {
    std::vector<std::vector<Uhat>> inputs;
    std::vector<VectorXd> x0;
    std::vector<MatrixXd> states;
    double energy = 0.0;
};

ValidationSet make_validation(const BilinearSystem& fom, const ReductionSettings& s)
{
    ValidationSet v;
    for (int k = 0; k < s.validation_signals; ++k) {
        auto u = staircase_uhat(s.operating_point, s.deviation, s.validation_steps, s.level_steps,
                                s.seed + static_cast<std::uint64_t>(k));
        Eigen::SparseLU<SpMat> lu(fom.state_jacobian(u.front()));
        if (lu.info() != Eigen::Success) {
            throw SingularMatrixError("reduce_h2: validation operator is singular");
        }
        VectorXd x0 = lu.solve(VectorXd(-(fom.B * u.front())));
        MatrixXd x = simulate_uhat(fom, u, x0, s.validation_dt);
        v.energy += x.squaredNorm();
        v.inputs.push_back(std::move(u));
        v.x0.push_back(std::move(x0));
        v.states.push_back(std::move(x));
    }
    return v;
}

struct Candidate {
    RomBasis basis;
    RomSystem rom;
    double max_error = std::numeric_limits<double>::infinity();
    double rel_mse = std::numeric_limits<double>::infinity();
};

Candidate evaluate(const BilinearSystem& fom, const MatrixXd& v, const MatrixXd& w, TestBasis test,
                   const ValidationSet& val, const ReductionSettings& s)
{
    Candidate c;
    c.basis = test == TestBasis::Galerkin ? RomBasis::from_bases(v, v) : RomBasis::from_bases(v, w);
    c.rom = project_system(fom, c.basis);
    if (val.inputs.empty()) {
        c.max_error = 0.0;
        c.rel_mse = 0.0;
        return c;
    }
    double max_err = 0.0;
    double err_energy = 0.0;
    for (std::size_t k = 0; k < val.inputs.size(); ++k) {
        const MatrixXd xr = simulate_uhat(c.rom, val.inputs[k], c.basis.project(val.x0[k]), s.validation_dt);
        const MatrixXd e = val.states[k] - c.basis.V * xr;
        if (!e.allFinite()) {
            return c;
        }
        max_err = std::max(max_err, e.cwiseAbs().maxCoeff());
        err_energy += e.squaredNorm();
    }
    c.max_error = max_err;
    c.rel_mse = val.energy > 0.0 ? err_energy / val.energy : err_energy;
    return c;
}

} // namespace

std::vector<Uhat> staircase_uhat(const Uhat& op, const Uhat& dev, int steps, int level_steps, std::uint64_t seed)
{
    if (steps < 1 || level_steps < 1) {
        throw std::invalid_argument("staircase_uhat: steps and level length must be positive");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<Uhat> out;
    out.reserve(steps);
    Uhat level = op;
    for (int k = 0; k < steps; ++k) {
        if (k % level_steps == 0) {
            for (int i = 0; i < 5; ++i) {
                level(i) = op(i) + dev(i) * unif(rng);
            }
        }
        out.push_back(level);
    }
    return out;
}

MatrixXd simulate_uhat(const model::BilinearPart& part, const std::vector<Uhat>& uhat, const VectorXd& x0,
                       double dt)
{
    const Eigen::Index n = part.order();
    MatrixXd out(n, static_cast<Eigen::Index>(uhat.size()) + 1);
    out.col(0) = x0;
    SpMat eye(n, n);
    eye.setIdentity();
    Eigen::SparseLU<SpMat> lu;
    SpMat m;
    Uhat current = Uhat::Constant(std::numeric_limits<double>::quiet_NaN());
    const VectorXd zero = VectorXd::Zero(n);
    VectorXd x = x0;
    for (std::size_t k = 0; k < uhat.size(); ++k) {
        if (!(uhat[k] == current)) {
            current = uhat[k];
            m = part.state_jacobian(current);
            SpMat lhs = eye - 0.5 * dt * m;
            lhs.makeCompressed();
            lu.compute(lhs);
            if (lu.info() != Eigen::Success) {
                throw SingularMatrixError("simulate_uhat: implicit step matrix is singular");
            }
        }
        const VectorXd f0 = part.rhs(zero, current);
        x = lu.solve(VectorXd(x + 0.5 * dt * (m * x) + dt * f0));
        out.col(static_cast<Eigen::Index>(k) + 1) = x;
    }
    return out;
}

ReductionResult reduce_h2(const BilinearSystem& fom, const ReductionSettings& settings)
{
    const Eigen::Index n = fom.order();
    const int r = settings.order;
    if (r < 1 || r > n) {
        std::ostringstream msg;
        msg << "reduce_h2: reduced order " << r << " outside [1, " << n << "]";
        throw DimensionError(msg.str());
    }
    ReductionResult result;
    if (r == n) {
        result.basis = RomBasis::make_identity(n);
        result.rom = project_system(fom, result.basis);
        result.converged = true;
        return result;
    }

    // Deviation realization around the operating point.
    const Uhat& op = settings.operating_point;
    const Uhat& dev = settings.deviation;
    SpMat a0 = fom.state_jacobian(op);
    a0.makeCompressed();
    Eigen::SparseLU<SpMat> lu(a0);
    if (lu.info() != Eigen::Success) {
        throw SingularMatrixError("reduce_h2: operator at the operating point is singular");
    }
    const VectorXd xbar = lu.solve(VectorXd(-(fom.B * op)));
    MatrixXd bdev(n, 5);
    std::vector<SpMat> nfull;
    double coupling = 0.0;
    for (int j = 0; j < 5; ++j) {
        bdev.col(j) = dev(j) * (fom.Q[j] * xbar + fom.B.col(j));
        if (fom.Q[j].nonZeros() > 0 && dev(j) != 0.0) {
            nfull.push_back(dev(j) * fom.Q[j]);
            coupling += sparse_norm1(nfull.back());
        }
    }
    SpMat a0t = a0.transpose();
    a0t.makeCompressed();

    // Initial bases from input-to-state and state-to-output directions.
    std::vector<VectorXd> vcols;
    std::vector<VectorXd> wcols;
    Eigen::SparseLU<SpMat> lut(a0t);
    MatrixXd kv = bdev;
    VectorXd kw = fom.C.transpose();
    for (int k = 0; k <= r; ++k) {
        for (Eigen::Index j = 0; j < kv.cols(); ++j) {
            vcols.push_back(kv.col(j));
        }
        wcols.push_back(kw);
        kv = lu.solve(kv);
        kw = lut.solve(kw);
    }
    for (const SpMat& q : fom.Q) {
        if (q.nonZeros() == 0) {
            continue;
        }
        for (Eigen::Index j = 0; j < bdev.cols(); ++j) {
            vcols.push_back(q * bdev.col(j));
        }
        wcols.push_back(SpMat(q.transpose()) * fom.C.transpose());
    }
    const MatrixXd v_init = dominant_directions(vcols, n, r);
    const MatrixXd w_init = dominant_directions(wcols, n, r);

    const ValidationSet val = make_validation(fom, settings);

    double gamma = coupling > 0.0 ? std::min(1.0, settings.contraction / coupling) : 1.0;
    for (int attempt = 0;; ++attempt) {
        std::vector<SpMat> ns;
        std::vector<SpMat> nst;
        for (const SpMat& q : nfull) {
            ns.push_back(gamma * q);
            nst.push_back(SpMat(ns.back().transpose()));
        }
        MatrixXd v = v_init;
        MatrixXd w = w_init;
        std::vector<ConvergenceRecord> log;
        Candidate best;
        int best_iter = -1;
        ConvergenceRecord best_rec;
        Eigen::VectorXcd prev_ev;
        bool converged = false;
        try {
            for (int it = 1; it <= settings.max_iterations; ++it) {
                const RomBasis cur = RomBasis::from_bases(v, w);
                const MatrixXd ar = cur.T * (a0 * cur.V);
                std::vector<MatrixXd> nh;
                std::vector<MatrixXd> nht;
                for (const SpMat& q : ns) {
                    nh.push_back(cur.T * (q * cur.V));
                    nht.push_back(nh.back().transpose());
                }
                const MatrixXd bh = cur.T * bdev;
                const Eigen::RowVectorXd ch = fom.C * cur.V;

                const auto xs = numerics::solve_generalized_sylvester(a0, ar, ns, nh, MatrixXd(bdev * bh.transpose()),
                                                                     settings.sylvester);
                const auto ys = numerics::solve_generalized_sylvester(
                    a0t, MatrixXd(ar.transpose()), nst, nht, MatrixXd(fom.C.transpose() * ch), settings.sylvester);
                v = numerics::orthonormalize(xs.solution);
                w = numerics::orthonormalize(ys.solution);

                const Eigen::VectorXcd ev = sorted_eigenvalues(ar);
                ConvergenceRecord rec;
                rec.iteration = it;
                rec.eigen_shift = prev_ev.size() == ev.size()
                                      ? (ev - prev_ev).cwiseAbs().maxCoeff() / ev.cwiseAbs().maxCoeff()
                                      : std::numeric_limits<double>::infinity();
                prev_ev = ev;
                rec.sweeps_v = xs.sweeps;
                rec.sweeps_w = ys.sweeps;
                rec.residual_v = xs.relative_residual;
                rec.residual_w = ys.relative_residual;
                Candidate cand = evaluate(fom, v, w, settings.final_projection, val, settings);
                rec.sampled_error = cand.max_error;
                rec.sampled_rel_mse = cand.rel_mse;
                log.push_back(rec);
                if (cand.max_error < best.max_error || best_iter < 0 || val.inputs.empty()) {
                    best = std::move(cand);
                    best_iter = it;
                    best_rec = rec;
                }
                if (rec.eigen_shift <= settings.eigen_tol) {
                    converged = true;
                    break;
                }
            }
        } catch (const ConvergenceError&) {
            if (attempt >= 6) {
                throw;
            }
            gamma *= 0.5;
            continue;
        }
        result.basis = std::move(best.basis);
        result.rom = std::move(best.rom);
        result.log = std::move(log);
        result.best_iteration = best_iter;
        result.converged = converged;
        result.bilinear_weight = gamma;
        result.residual_v = best_rec.residual_v;
        result.residual_w = best_rec.residual_w;
        return result;
    }
}

} // namespace vfbd::mor
