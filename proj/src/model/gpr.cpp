#include "vfbd/model/gpr.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "vfbd/errors.hpp"

namespace vfbd::model {

namespace {

constexpr double kMinRcond = 1e-14;

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
            cell.pop_back();
        }
        while (!cell.empty() && cell.front() == ' ') {
            cell.erase(cell.begin());
        }
        out.push_back(cell);
    }
    return out;
}

} // namespace

double GprModel::kernel(const Eigen::Vector2d& a, const Eigen::Vector2d& b) const
{
    const Eigen::Array2d d = (a - b).array() / hyper_.length_scales.array();
    return hyper_.signal_variance * std::exp(-0.5 * d.square().sum());
}

GprModel GprModel::fit(const Eigen::MatrixX2d& inputs, const Eigen::VectorXd& targets, const GprHyper& hyper)
{
    if (inputs.rows() < 1 || inputs.rows() != targets.size()) {
        throw DimensionError("gpr_fit: need at least one training point and one target per input");
    }
    if (!(hyper.length_scales.array() > 0.0).all() || !(hyper.signal_variance > 0.0) ||
        !(hyper.noise_variance >= 0.0) || !(hyper.floor >= 0.0)) {
        throw std::invalid_argument("gpr_fit: hyperparameters must be positive");
    }
    GprModel m;
    m.inputs_ = inputs;
    m.hyper_ = hyper;
    const Eigen::Index n = inputs.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            k(i, j) = m.kernel(inputs.row(i).transpose(), inputs.row(j).transpose());
            k(j, i) = k(i, j);
        }
    }
    k.diagonal().array() += hyper.noise_variance;
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() != Eigen::Success || !(llt.rcond() > kMinRcond)) {
        throw SingularMatrixError("gpr_fit: kernel matrix is numerically singular");
    }
    m.alpha_ = llt.solve((targets.array() - hyper.prior_mean).matrix());
    return m;
}

double GprModel::predict_raw(const Eigen::Vector2d& theta) const
{
    double mean = hyper_.prior_mean;
    for (Eigen::Index i = 0; i < inputs_.rows(); ++i) {
        mean += kernel(theta, inputs_.row(i).transpose()) * alpha_(i);
    }
    return mean;
}

double GprModel::predict(const Eigen::Vector2d& theta) const
{
    return std::max(predict_raw(theta), hyper_.floor);
}

Coefficients GprSet::predict(const PlantInputs& u) const
{
    const Eigen::Vector2d theta(u.mdot_a, u.a_vib);
    return {v.predict(theta), D.predict(theta), zeta.predict(theta)};
}

GprSet fit_gpr_set(const GprTrainingSet& data, const GprHyperSet& hyper)
{
    return {GprModel::fit(data.theta, data.v, hyper.v), GprModel::fit(data.theta, data.D, hyper.D),
            GprModel::fit(data.theta, data.zeta, hyper.zeta)};
}

Coefficients reference_coefficients(double mdot_a, double a_vib)
{
    const double flow = mdot_a / 0.04;
    return {0.011 * (0.6 + 0.4 * a_vib) * (0.85 + 0.15 * flow), 1e-3 * (0.7 + 0.3 * a_vib) * (0.8 + 0.2 * flow),
            0.0156 * (0.5 + 0.5 * a_vib) * (0.9 + 0.1 * flow)};
}

GprTrainingSet synthetic_gpr_training(int points_per_axis, double mdot_lo, double mdot_hi, double avib_lo,
                                      double avib_hi)
{
    if (points_per_axis < 1) {
        throw std::invalid_argument("synthetic_gpr_training: need at least one point per axis");
    }
    const int n = points_per_axis * points_per_axis;
    GprTrainingSet t;
    t.theta.resize(n, 2);
    t.v.resize(n);
    t.D.resize(n);
    t.zeta.resize(n);
    auto lerp = [&](double lo, double hi, int i) {
        return points_per_axis == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (points_per_axis - 1);
    };
    int row = 0;
    for (int i = 0; i < points_per_axis; ++i) {
        for (int j = 0; j < points_per_axis; ++j, ++row) {
            const double ma = lerp(mdot_lo, mdot_hi, i);
            const double av = lerp(avib_lo, avib_hi, j);
            const Coefficients c = reference_coefficients(ma, av);
            t.theta(row, 0) = ma;
            t.theta(row, 1) = av;
            t.v(row) = c.v;
            t.D(row) = c.D;
            t.zeta(row) = c.zeta;
        }
    }
    return t;
}

GprTrainingSet load_gpr_training(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open GPR training file " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError("GPR training file is empty: " + path);
    }
    const auto header = split_csv(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) {
        col[header[i]] = i;
    }
    const char* required[] = {"mdot_a", "a_vib", "v", "D", "zeta"};
    for (const char* name : required) {
        if (!col.count(name)) {
            throw ConfigError(std::string("GPR training file lacks column ") + name + ": " + path);
        }
    }
    std::vector<std::array<double, 5>> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") {
            continue;
        }
        const auto cells = split_csv(line);
        if (cells.size() != header.size()) {
            throw ConfigError("GPR training file " + path + ": wrong cell count on line " + std::to_string(line_no));
        }
        std::array<double, 5> r{};
        for (int k = 0; k < 5; ++k) {
            try {
                r[k] = std::stod(cells[col[required[k]]]);
            } catch (const std::exception&) {
                throw ConfigError("GPR training file " + path + ": bad number on line " + std::to_string(line_no));
            }
            if (!std::isfinite(r[k])) {
                throw ConfigError("GPR training file " + path + ": non-finite value on line " +
                                  std::to_string(line_no));
            }
        }
        rows.push_back(r);
    }
    GprTrainingSet t;
    const auto n = static_cast<Eigen::Index>(rows.size());
    t.theta.resize(n, 2);
    t.v.resize(n);
    t.D.resize(n);
    t.zeta.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        t.theta(i, 0) = rows[i][0];
        t.theta(i, 1) = rows[i][1];
        t.v(i) = rows[i][2];
        t.D(i) = rows[i][3];
        t.zeta(i) = rows[i][4];
    }
    return t;
}

void save_gpr_training(const GprTrainingSet& data, const std::string& path)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write GPR training file " + path);
    }
    out << "mdot_a,a_vib,v,D,zeta\n" << std::setprecision(17);
    for (Eigen::Index i = 0; i < data.theta.rows(); ++i) {
        out << data.theta(i, 0) << ',' << data.theta(i, 1) << ',' << data.v(i) << ',' << data.D(i) << ','
            << data.zeta(i) << '\n';
    }
    if (!out) {
        throw IoError("failed writing GPR training file " + path);
    }
}

} // namespace vfbd::model
