#include "vfbd/harness/signal_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace vfbd::harness {

namespace {

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        out.emplace_back();
    }
    return out;
}

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col)
{
    const std::string s = trim(cell);
    double v = std::nan("");
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "signal log: invalid value '" << s << "' in column " << col << " at data row " << row;
        throw MissingValueError(msg.str());
    }
    return v;
}

} // namespace

const std::vector<std::string>& signal_columns()
{
    static const std::vector<std::string> cols{"t", "T_a", "mdot_a", "a_vib", "dP", "mdot_s", "mdot_l", "phi_a", "y"};
    return cols;
}

std::string format_double(double v)
{
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

void check_uniform_grid(const model::SignalLog& log, double expected_dt)
{
    if (log.size() < 2) {
        return;
    }
    const double dt = expected_dt > 0.0 ? expected_dt : log.dt();
    if (!(dt > 0.0)) {
        throw NonUniformGridError("signal log: time stamps are not strictly increasing");
    }
    const double tol = 1e-9 * std::max(1.0, dt);
    for (std::size_t k = 1; k < log.size(); ++k) {
        const double step = log.samples[k].t - log.samples[k - 1].t;
        if (std::abs(step - dt) > tol) {
            std::ostringstream msg;
            msg << "signal log: spacing " << step << " at row " << k << " differs from " << dt;
            throw NonUniformGridError(msg.str());
        }
    }
}

model::SignalLog load_signal_log(const std::string& path, double expected_dt)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open signal log: " + path);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw SchemaError("signal log: empty file " + path, "t");
    }
    const auto& cols = signal_columns();
    std::vector<int> index(cols.size(), -1);
    const std::vector<std::string> header = split(line);
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = trim(header[i]);
        std::size_t c = 0;
        while (c < cols.size() && cols[c] != name) {
            ++c;
        }
        if (c == cols.size()) {
            throw SchemaError("signal log: unknown column '" + name + "'", name);
        }
        if (index[c] >= 0) {
            throw SchemaError("signal log: duplicate column '" + name + "'", name);
        }
        index[c] = int(i);
    }
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (index[c] < 0) {
            throw SchemaError("signal log: missing column '" + cols[c] + "'", cols[c]);
        }
    }

    model::SignalLog log;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty()) {
            continue;
        }
        ++row;
        const std::vector<std::string> cells = split(line);
        if (cells.size() != header.size()) {
            std::ostringstream msg;
            msg << "signal log: data row " << row << " has " << cells.size() << " fields, header has "
                << header.size();
            throw MissingValueError(msg.str());
        }
        std::array<double, 9> v{};
        for (std::size_t c = 0; c < cols.size(); ++c) {
            v[c] = parse_cell(cells[std::size_t(index[c])], row, cols[c]);
        }
        model::SignalSample s;
        s.t = v[0];
        s.u = {v[1], v[2], v[3], v[4]};
        s.w = {v[5], v[6], v[7]};
        s.y = v[8];
        log.samples.push_back(s);
    }
    if (in.bad()) {
        throw IoError("read failed: " + path);
    }
    check_uniform_grid(log, expected_dt);
    return log;
}

void write_signal_log(const std::string& path, const model::SignalLog& log)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write signal log: " + path);
    }
    const auto& cols = signal_columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        out << (c ? "," : "") << cols[c];
    }
    out << '\n';
    for (const auto& s : log.samples) {
        const std::array<double, 9> v{s.t,        s.u.T_a,    s.u.mdot_a, s.u.a_vib, s.u.dP,
                                      s.w.mdot_s, s.w.mdot_l, s.w.phi_a,  s.y};
        for (std::size_t c = 0; c < v.size(); ++c) {
            out << (c ? "," : "") << format_double(v[c]);
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

} // namespace vfbd::harness
