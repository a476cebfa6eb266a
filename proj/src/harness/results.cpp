#include "vfbd/harness/results.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <memory>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "vfbd/harness/signal_io.hpp"
#include "vfbd/stats.hpp"

namespace vfbd::harness {

namespace fs = std::filesystem;

namespace {

std::string num(double v)
{
    return format_double(v);
}

std::string render(const CsvTable& t)
{
    std::ostringstream out;
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        out << (c ? "," : "") << t.header[c];
    }
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << (c ? "," : "") << row[c];
        }
        out << '\n';
    }
    return out.str();
}

std::vector<std::string> split_line(const std::string& line)
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

void write_file(const fs::path& path, const std::string& bytes)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << bytes;
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    return std::string(std::istreambuf_iterator<char>(in), {});
}

// Commas would break the CSV; failure texts are free-form.
std::string sanitize(std::string s)
{
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

} // namespace

void CsvTable::add_row(std::vector<std::string> row)
{
    if (row.size() != header.size()) {
        throw DimensionError("CsvTable " + name + ": row width differs from header");
    }
    rows.push_back(std::move(row));
}

std::string sha256_hex(const std::string& bytes)
{
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), md, &len) != 1) {
        throw IoError("sha256 failed");
    }
    std::ostringstream out;
    out << std::hex << std::setfill('0');
    for (unsigned int i = 0; i < len; ++i) {
        out << std::setw(2) << int(md[i]);
    }
    return out.str();
}

std::string sha256_file(const std::string& path)
{
    return sha256_hex(read_file(path));
}

std::vector<ManifestEntry> emit_results(const ResultSet& results, const std::string& out_dir)
{
    std::set<std::string> names;
    const auto valid_name = [](const std::string& n) {
        return !n.empty() && n != kManifestName && n.find('/') == std::string::npos;
    };
    for (const auto& a : results.attachments) {
        if (!valid_name(a) || !names.insert(a).second) {
            throw ConfigError("emit_results: invalid or duplicate attachment '" + a + "'");
        }
    }
    for (const auto& t : results.tables) {
        if (t.name.empty() || t.name == kManifestName || t.name.find('/') != std::string::npos) {
            throw ConfigError("emit_results: invalid table name '" + t.name + "'");
        }
        if (!names.insert(t.name).second) {
            throw ConfigError("emit_results: duplicate table name '" + t.name + "'");
        }
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
        throw IoError("cannot create output directory " + out_dir);
    }

    std::vector<ManifestEntry> manifest;
    for (const auto& t : results.tables) {
        const std::string bytes = render(t);
        write_file(fs::path(out_dir) / t.name, bytes);
        manifest.push_back({t.name, bytes.size(), sha256_hex(bytes), t.deterministic});
    }
    for (const auto& a : results.attachments) {
        const std::string bytes = read_file((fs::path(out_dir) / a).string());
        manifest.push_back({a, bytes.size(), sha256_hex(bytes), true});
    }
    std::sort(manifest.begin(), manifest.end(),
              [](const ManifestEntry& a, const ManifestEntry& b) { return a.file < b.file; });

    std::ostringstream m;
    m << "file,bytes,sha256,deterministic\n";
    for (const auto& e : manifest) {
        m << e.file << ',' << e.bytes << ',' << e.sha256 << ',' << int(e.deterministic) << '\n';
    }
    write_file(fs::path(out_dir) / kManifestName, m.str());
    return manifest;
}

CsvTable load_csv_table(const std::string& path)
{
    std::istringstream in(read_file(path));
    CsvTable t;
    t.name = fs::path(path).filename().string();
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError("empty table: " + path);
    }
    t.header = split_line(line);
    while (std::getline(in, line)) {
        auto row = split_line(line);
        if (row.size() != t.header.size()) {
            throw IoError("ragged row in " + path);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<ManifestEntry> load_manifest(const std::string& path)
{
    const CsvTable t = load_csv_table(path);
    const std::vector<std::string> expect{"file", "bytes", "sha256", "deterministic"};
    if (t.header != expect) {
        throw IoError("not a manifest: " + path);
    }
    std::vector<ManifestEntry> out;
    for (const auto& r : t.rows) {
        out.push_back({r[0], std::stoul(r[1]), r[2], r[3] == "1"});
    }
    return out;
}

CsvTable trajectory_table(const std::string& name, const model::Trajectory& traj)
{
    CsvTable t{name, {"t", "y", "m_h", "eps", "T_s"}, {}, true};
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        const auto& s = traj.states[k];
        t.add_row({num(traj.t[k]), num(traj.y[k]), num(s.m_h), num(s.eps), num(s.T_s)});
    }
    return t;
}

CsvTable step_time_table(const std::string& name, const model::Trajectory& traj)
{
    CsvTable t{name, {"step", "seconds"}, {}, false};
    for (std::size_t k = 0; k < traj.step_seconds.size(); ++k) {
        t.add_row({std::to_string(k + 1), num(traj.step_seconds[k])});
    }
    return t;
}

CsvTable rom_report_table(const std::string& name, const mor::RomErrorReport& rep)
{
    CsvTable t{name, {"metric", "value"}, {}, false};
    t.add_row({"relative_mse", num(rep.relative_mse)});
    t.add_row({"max_abs_error", num(rep.max_abs_error)});
    t.add_row({"output_max_error", num(rep.output_max_error)});
    t.add_row({"fom_step_mean_ms", num(1e3 * rep.fom_step_mean)});
    t.add_row({"fom_step_std_ms", num(1e3 * rep.fom_step_std)});
    t.add_row({"rom_step_mean_ms", num(1e3 * rep.rom_step_mean)});
    t.add_row({"rom_step_std_ms", num(1e3 * rep.rom_step_std)});
    t.add_row({"speedup", num(rep.speedup)});
    t.add_row({"steps", std::to_string(rep.steps)});
    return t;
}

CsvTable reduction_log_table(const std::string& name, const mor::ReductionResult& red)
{
    CsvTable t{name,
               {"iteration", "eigen_shift", "sampled_error", "sampled_rel_mse", "sweeps_v", "sweeps_w",
                "residual_v", "residual_w", "best"},
               {},
               true};
    for (const auto& c : red.log) {
        t.add_row({std::to_string(c.iteration), num(c.eigen_shift), num(c.sampled_error), num(c.sampled_rel_mse),
                   std::to_string(c.sweeps_v), std::to_string(c.sweeps_w), num(c.residual_v), num(c.residual_w),
                   c.iteration == red.best_iteration ? "1" : "0"});
    }
    return t;
}

CsvTable observer_table(const std::string& name, const std::vector<observer::ObserverLogRow>& rows)
{
    CsvTable t{name,
               {"t", "y_hat", "m_h", "eps", "T_s", "innovation", "trace_P", "step_ns", "reconcile_failed",
                "gain_fallback"},
               {},
               false};
    for (const auto& r : rows) {
        t.add_row({num(r.t), num(r.y_hat), num(r.m_h), num(r.eps), num(r.T_s), num(r.innovation), num(r.trace_p),
                   std::to_string(r.step_ns), r.flags.reconcile_failed ? "1" : "0",
                   r.flags.gain_fallback ? "1" : "0"});
    }
    return t;
}

CsvTable timing_table(const std::string& name, const TimingReport& report)
{
    CsvTable t{name, {"N", "r", "module", "mean_ms", "std_ms", "samples", "status", "note"}, {}, false};
    for (const auto& c : report.cells) {
        const char* status = !c.available ? "unavailable" : c.noisy ? "noisy" : "ok";
        t.add_row({std::to_string(c.n), std::to_string(c.r), c.module, c.available ? num(c.mean_ms) : "",
                   c.available ? num(c.std_ms) : "", std::to_string(c.samples), status, sanitize(c.note)});
    }
    return t;
}

CsvTable signal_table(const std::string& name, const model::SignalLog& log)
{
    CsvTable t{name, signal_columns(), {}, true};
    for (const auto& s : log.samples) {
        t.add_row({num(s.t), num(s.u.T_a), num(s.u.mdot_a), num(s.u.a_vib), num(s.u.dP), num(s.w.mdot_s),
                   num(s.w.mdot_l), num(s.w.phi_a), num(s.y)});
    }
    return t;
}

std::vector<CsvTable> monte_carlo_tables(const std::string& prefix, const MonteCarloResult& mc)
{
    std::vector<CsvTable> out;

    CsvTable summary{prefix + "summary.csv", {"observer", "runs", "converged", "failed", "convergence_rate"}, {}, true};
    for (const auto& s : mc.summary) {
        summary.add_row({s.observer, std::to_string(s.runs), std::to_string(s.converged), std::to_string(s.failed),
                         num(s.convergence_rate())});
    }
    out.push_back(std::move(summary));

    CsvTable bands{prefix + "bands.csv", {"t"}, {}, true};
    for (const auto& s : mc.summary) {
        for (const char* col : {"_state_mean", "_state_std", "_algebraic_mean", "_algebraic_std"}) {
            bands.header.push_back(s.observer + col);
        }
    }
    for (std::size_t k = 0; k < mc.t.size(); ++k) {
        std::vector<std::string> row{num(mc.t[k])};
        for (const auto& s : mc.summary) {
            for (const auto* v : {&s.state_mean, &s.state_std, &s.algebraic_mean, &s.algebraic_std}) {
                row.push_back(k < v->size() ? num((*v)[k]) : "");
            }
        }
        bands.add_row(std::move(row));
    }
    out.push_back(std::move(bands));

    CsvTable runs{prefix + "runs.csv",
                  {"run", "observer", "converged", "failed", "final_state_error", "final_algebraic_error", "failure"},
                  {},
                  true};
    for (const auto& r : mc.records) {
        runs.add_row({std::to_string(r.run), r.observer, r.converged ? "1" : "0", r.failed ? "1" : "0",
                      r.state_error.empty() ? "" : num(r.state_error.back()),
                      r.algebraic_error.empty() ? "" : num(r.algebraic_error.back()), sanitize(r.failure)});
    }
    out.push_back(std::move(runs));

    CsvTable steps{prefix + "step_times.csv", {"observer", "mean_ms", "std_ms"}, {}, false};
    for (const auto& s : mc.summary) {
        steps.add_row({s.observer, num(1e3 * s.step_mean), num(1e3 * s.step_std)});
    }
    out.push_back(std::move(steps));
    return out;
}

} // namespace vfbd::harness
