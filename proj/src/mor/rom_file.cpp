#include "vfbd/mor/rom_file.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vfbd/errors.hpp"

namespace vfbd::mor {

namespace {

constexpr const char* kMagic = "vfbd-rom";
constexpr int kVersion = 1;

void write_matrix(std::ostream& out, const std::string& name, const Eigen::MatrixXd& m)
{
    out << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    out << std::hexfloat;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << (j ? " " : "") << m(i, j);
        }
        out << '\n';
    }
    out << std::defaultfloat;
}

Eigen::MatrixXd read_matrix(std::istream& in, const std::string& expected, const std::string& path)
{
    std::string name;
    Eigen::Index rows = -1;
    Eigen::Index cols = -1;
    if (!(in >> name >> rows >> cols) || name != expected || rows < 0 || cols < 0) {
        throw ConfigError("ROM file " + path + ": expected matrix block " + expected);
    }
    Eigen::MatrixXd m(rows, cols);
    std::string token;
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            if (!(in >> token)) {
                throw ConfigError("ROM file " + path + ": truncated matrix " + expected);
            }
            char* end = nullptr;
            m(i, j) = std::strtod(token.c_str(), &end);
            if (end == token.c_str() || *end != '\0') {
                throw ConfigError("ROM file " + path + ": bad number '" + token + "' in " + expected);
            }
        }
    }
    return m;
}

} // namespace

void save_rom(const std::string& path, const RomSystem& rom, const RomBasis& basis)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write ROM file " + path);
    }
    out << kMagic << ' ' << kVersion << ' ' << basis.full_order() << ' ' << basis.reduced_order() << '\n';
    write_matrix(out, "Ar", rom.Ar);
    for (int i = 0; i < 5; ++i) {
        write_matrix(out, "Qr" + std::to_string(i + 1), rom.Qr[i]);
    }
    write_matrix(out, "Br", rom.Br);
    write_matrix(out, "Cr", rom.Cr);
    write_matrix(out, "V", basis.V);
    write_matrix(out, "W", basis.W);
    write_matrix(out, "T", basis.T);
    if (!out) {
        throw IoError("failed writing ROM file " + path);
    }
}

RomFile load_rom(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open ROM file " + path);
    }
    std::string magic;
    int version = 0;
    Eigen::Index n = 0;
    Eigen::Index r = 0;
    if (!(in >> magic >> version >> n >> r) || magic != kMagic || version != kVersion || n < 1 || r < 1 || r > n) {
        throw ConfigError("ROM file " + path + ": bad header");
    }
    RomFile f;
    f.rom.Ar = read_matrix(in, "Ar", path);
    for (int i = 0; i < 5; ++i) {
        f.rom.Qr[i] = read_matrix(in, "Qr" + std::to_string(i + 1), path);
    }
    const Eigen::MatrixXd br = read_matrix(in, "Br", path);
    const Eigen::MatrixXd cr = read_matrix(in, "Cr", path);
    f.basis.V = read_matrix(in, "V", path);
    f.basis.W = read_matrix(in, "W", path);
    f.basis.T = read_matrix(in, "T", path);
    const auto check = [&](const Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols, const char* name) {
        if (m.rows() != rows || m.cols() != cols) {
            throw ConfigError(std::string("ROM file ") + path + ": matrix " + name + " has wrong dimensions");
        }
    };
    check(f.rom.Ar, r, r, "Ar");
    for (const auto& q : f.rom.Qr) {
        check(q, r, r, "Qr");
    }
    check(br, r, 5, "Br");
    check(cr, 1, r, "Cr");
    f.rom.Br = br;
    f.rom.Cr = cr;
    check(f.basis.V, n, r, "V");
    check(f.basis.W, n, r, "W");
    check(f.basis.T, r, n, "T");
    f.basis.identity = n == r && f.basis.V.isIdentity(0.0) && f.basis.W.isIdentity(0.0) && f.basis.T.isIdentity(0.0);
    return f;
}

} // namespace vfbd::mor
