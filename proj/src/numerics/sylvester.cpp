#include "vfbd/numerics/sylvester.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

namespace vfbd::numerics {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Complex = std::complex<double>;
using SparseComplex = Eigen::SparseMatrix<Complex>;

namespace {

constexpr double kOverlapRcond = 1e-13;

class ShiftedFactor {
public:
    virtual ~ShiftedFactor() = default;
    virtual VectorXcd solve(const VectorXcd& rhs) const = 0;
};

class DenseShifted final : public ShiftedFactor {
public:
    DenseShifted(const MatrixXd& a, Complex shift)
    {
        MatrixXcd m = a.cast<Complex>();
        m.diagonal().array() += shift;
        lu_.compute(m);
        if (!(lu_.rcond() > kOverlapRcond)) {
            std::ostringstream msg;
            msg << "solve_sylvester: spectra of A and -B overlap near " << -shift;
            throw SpectralOverlapError(msg.str());
        }
    }
    VectorXcd solve(const VectorXcd& rhs) const override { return lu_.solve(rhs); }

private:
    Eigen::PartialPivLU<MatrixXcd> lu_;
};

class SparseShifted final : public ShiftedFactor {
public:
    SparseShifted(const Eigen::SparseMatrix<double>& a, Complex shift)
    {
        SparseComplex m = a.cast<Complex>();
        SparseComplex eye(a.rows(), a.cols());
        eye.setIdentity();
        m += shift * eye;
        m.makeCompressed();
        lu_.compute(m);
        if (lu_.info() != Eigen::Success) {
            std::ostringstream msg;
            msg << "solve_sylvester: spectra of A and -B overlap near " << -shift;
            throw SpectralOverlapError(msg.str());
        }
        matrix_ = std::move(m);
    }
    VectorXcd solve(const VectorXcd& rhs) const override
    {
        VectorXcd x = lu_.solve(rhs);
        const double scale = rhs.norm();
        if (!x.allFinite() || (scale > 0.0 && (matrix_ * x - rhs).norm() > 1e-8 * scale)) {
            throw SpectralOverlapError("solve_sylvester: shifted sparse system is numerically singular");
        }
        return x;
    }

private:
    SparseComplex matrix_;
    mutable Eigen::SparseLU<SparseComplex> lu_;
};

template <typename AType>
double relative_residual(const AType& a, const MatrixXd& ar, std::span<const AType> n, std::span<const MatrixXd> nhat,
                         const MatrixXd& rhs, const MatrixXd& x)
{
    MatrixXd res = a * x + x * ar.transpose() + rhs;
    for (std::size_t j = 0; j < n.size(); ++j) {
        res += n[j] * (x * nhat[j].transpose());
    }
    const double denom = rhs.norm();
    return denom > 0.0 ? res.norm() / denom : res.norm();
}

template <typename AType>
GeneralizedSylvesterResult generalized_impl(const AType& a, const MatrixXd& ar, std::span<const AType> n,
                                            std::span<const MatrixXd> nhat, const MatrixXd& rhs,
                                            const GeneralizedSylvesterSettings& settings)
{
    if (n.size() != nhat.size()) {
        throw DimensionError("solve_generalized_sylvester: bilinear term counts differ");
    }
    if (rhs.rows() != a.rows() || rhs.cols() != ar.rows()) {
        throw DimensionError("solve_generalized_sylvester: right-hand side has wrong shape");
    }
    const SylvesterSolver solver(a, MatrixXd(ar.transpose()));
    GeneralizedSylvesterResult out;
    if (rhs.norm() == 0.0) {
        out.solution = MatrixXd::Zero(rhs.rows(), rhs.cols());
        return out;
    }
    MatrixXd x = solver.solve(rhs);
    double update = 0.0;
    for (int sweep = 1; sweep <= settings.max_sweeps; ++sweep) {
        if (n.empty()) {
            out.sweeps = 0;
            update = 0.0;
            break;
        }
        MatrixXd lagged = rhs;
        for (std::size_t j = 0; j < n.size(); ++j) {
            lagged.noalias() += n[j] * (x * nhat[j].transpose());
        }
        MatrixXd next = solver.solve(lagged);
        const double denom = std::max(next.norm(), 1e-300);
        update = (next - x).norm() / denom;
        x = std::move(next);
        out.sweeps = sweep;
        if (!std::isfinite(update)) {
            break;
        }
        if (update <= settings.tol) {
            break;
        }
    }
    out.relative_residual = relative_residual<AType>(a, ar, n, nhat, rhs, x);
    if (!(update <= settings.tol)) {
        std::ostringstream msg;
        msg << "solve_generalized_sylvester: no convergence after " << out.sweeps
            << " sweeps (relative update " << update << ", residual " << out.relative_residual << ")";
        throw ConvergenceError(msg.str());
    }
    out.solution = std::move(x);
    return out;
}

} // namespace

struct SylvesterSolver::Impl {
    Eigen::Index n = 0;
    MatrixXcd schur_t;   // upper triangular S
    MatrixXcd schur_u;   // unitary U
    std::vector<std::unique_ptr<ShiftedFactor>> factors;

    template <typename Factory>
    void init(Eigen::Index rows, const MatrixXd& b, Factory&& make)
    {
        if (b.rows() != b.cols()) {
            throw DimensionError("solve_sylvester: B must be square");
        }
        n = rows;
        if (b.rows() == 0) {
            return;
        }
        Eigen::ComplexSchur<MatrixXcd> schur(b.cast<Complex>());
        if (schur.info() != Eigen::Success) {
            throw NumericalError("solve_sylvester: Schur decomposition failed");
        }
        schur_t = schur.matrixT();
        schur_u = schur.matrixU();
        factors.reserve(b.rows());
        for (Eigen::Index k = 0; k < b.rows(); ++k) {
            factors.push_back(make(schur_t(k, k)));
        }
    }
};

SylvesterSolver::SylvesterSolver(const MatrixXd& a, const MatrixXd& b) : impl_(std::make_unique<Impl>())
{
    if (a.rows() != a.cols()) {
        throw DimensionError("solve_sylvester: A must be square");
    }
    impl_->init(a.rows(), b, [&](Complex s) { return std::make_unique<DenseShifted>(a, s); });
}

SylvesterSolver::SylvesterSolver(const Eigen::SparseMatrix<double>& a, const MatrixXd& b)
    : impl_(std::make_unique<Impl>())
{
    if (a.rows() != a.cols()) {
        throw DimensionError("solve_sylvester: A must be square");
    }
    impl_->init(a.rows(), b, [&](Complex s) { return std::make_unique<SparseShifted>(a, s); });
}

SylvesterSolver::~SylvesterSolver() = default;
SylvesterSolver::SylvesterSolver(SylvesterSolver&&) noexcept = default;
SylvesterSolver& SylvesterSolver::operator=(SylvesterSolver&&) noexcept = default;

MatrixXd SylvesterSolver::solve(const MatrixXd& c) const
{
    const auto m = static_cast<Eigen::Index>(impl_->factors.size());
    if (c.rows() != impl_->n || c.cols() != m) {
        throw DimensionError("solve_sylvester: C has wrong shape");
    }
    if (m == 0) {
        return MatrixXd(impl_->n, 0);
    }
    const MatrixXcd rhs = -(c.cast<Complex>() * impl_->schur_u);
    MatrixXcd y(impl_->n, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        VectorXcd col = rhs.col(k);
        for (Eigen::Index l = 0; l < k; ++l) {
            col.noalias() -= impl_->schur_t(l, k) * y.col(l);
        }
        y.col(k) = impl_->factors[k]->solve(col);
    }
    return (y * impl_->schur_u.adjoint()).real();
}

MatrixXd solve_sylvester(const MatrixXd& a, const MatrixXd& b, const MatrixXd& c)
{
    return SylvesterSolver(a, b).solve(c);
}

MatrixXd solve_sylvester(const Eigen::SparseMatrix<double>& a, const MatrixXd& b, const MatrixXd& c)
{
    return SylvesterSolver(a, b).solve(c);
}

GeneralizedSylvesterResult solve_generalized_sylvester(const MatrixXd& a, const MatrixXd& ar,
                                                       std::span<const MatrixXd> n, std::span<const MatrixXd> nhat,
                                                       const MatrixXd& rhs,
                                                       const GeneralizedSylvesterSettings& settings)
{
    return generalized_impl<MatrixXd>(a, ar, n, nhat, rhs, settings);
}

GeneralizedSylvesterResult solve_generalized_sylvester(const Eigen::SparseMatrix<double>& a, const MatrixXd& ar,
                                                       std::span<const Eigen::SparseMatrix<double>> n,
                                                       std::span<const MatrixXd> nhat, const MatrixXd& rhs,
                                                       const GeneralizedSylvesterSettings& settings)
{
    return generalized_impl<Eigen::SparseMatrix<double>>(a, ar, n, nhat, rhs, settings);
}

} // namespace vfbd::numerics
