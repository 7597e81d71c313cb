#include "spdelab/results.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "spdelab/error.hpp"

namespace spdelab {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        out.push_back(cell);
    }
    return out;
}

double parse_double(const std::string& s, std::size_t line)
{
    char* end = nullptr;
    double x = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        fail(ErrorCode::Config, "line " + std::to_string(line) + ": not a number: '" + s + "'");
    return x;
}

// JSON has no NaN; non-finite values become null.
nlohmann::json num(double x)
{
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

nlohmann::json header_json(const OutputHeader& h)
{
    nlohmann::json j = nlohmann::json::object();
    j["kind"] = h.kind;
    j["base_seed"] = h.base_seed;
    for (const auto& [k, v] : h.fields) j[k] = v;
    return j;
}

std::optional<double> common_truth(const MCResult& mc)
{
    if (mc.per_nu.empty()) return std::nullopt;
    double t = mc.per_nu.front().truth;
    for (const auto& s : mc.per_nu)
        if (s.truth != t) return std::nullopt;
    return t;
}

}  // namespace

EstimateRecord::EstimateRecord() : y0(kNaN), t0(kNaN) {}

std::string format_double(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_header(std::ostream& out, const OutputHeader& header)
{
    out << "# spdelab " << header.kind << "\n";
    out << "# base_seed=" << header.base_seed << "\n";
    for (const auto& [k, v] : header.fields) out << "# " << k << "=" << v << "\n";
}

void write_estimate_csv(std::ostream& out, const OutputHeader& header, const std::vector<EstimateRecord>& rows)
{
    write_header(out, header);
    out << kEstimateColumns << "\n";
    for (const auto& r : rows) {
        out << r.estimator << ',' << format_double(r.y0) << ',' << format_double(r.t0) << ',';
        if (r.result) {
            const auto& e = *r.result;
            out << format_double(e.theta_hat) << ',' << format_double(e.fisher) << ','
                << format_double(e.standard_error) << ',' << format_double(e.ci.lo) << ',' << format_double(e.ci.hi)
                << ',' << format_double(e.alpha_bar) << ',' << e.n_increments << ',';
            if (e.window)
                out << format_double(e.window->y0) << ',' << format_double(e.window->t0) << ','
                    << format_double(e.window->delta_y) << ',' << format_double(e.window->delta_t) << ',';
            else
                out << "nan,nan,nan,nan,";
        } else {
            out << "nan,nan,nan,nan,nan,nan,0,nan,nan,nan,nan,";
        }
        out << (r.clipped ? 1 : 0) << ',' << r.spectral_modes << ',' << r.status << "\n";
    }
}

void write_mc_csv(std::ostream& out, const OutputHeader& header, const MCResult& mc)
{
    OutputHeader h = header;
    if (auto t = common_truth(mc)) h.add("truth", *t);
    write_header(out, h);
    out << kMcColumns << "\n";
    for (const auto& s : mc.per_nu)
        for (const auto& r : s.runs)
            out << format_double(s.nu) << ',' << r.run << ',' << r.seed << ',' << format_double(r.theta_hat) << ','
                << format_double(r.fisher) << ',' << format_double(r.ci_lo) << ',' << format_double(r.ci_hi) << ','
                << (r.covered ? 1 : 0) << ',' << (r.blowup ? 1 : 0) << "\n";
}

void write_diagnostics_csv(std::ostream& out, const OutputHeader& header, const MCResult& mc)
{
    write_header(out, header);
    out << kDiagnosticsColumns << "\n";
    for (const auto& s : mc.per_nu) {
        const double runs = static_cast<double>(s.runs.size());
        const auto& d = s.diagnostics;
        out << format_double(s.nu) << ',' << format_double(s.truth) << ',' << s.runs.size() << ',' << s.used << ','
            << s.blowups << ',' << format_double(runs > 0 ? static_cast<double>(s.blowups) / runs : 0.0) << ','
            << format_double(s.mse) << ',' << format_double(s.bias) << ',' << format_double(s.variance) << ','
            << format_double(d.coverage) << ',' << format_double(d.z_mean) << ',' << format_double(d.z_variance)
            << ',' << format_double(d.ks_distance) << ',';
        if (s.mesh)
            out << mesh_status_name(s.mesh->status) << ',' << format_double(s.mesh->ratio_t) << ','
                << format_double(s.mesh->ratio_y);
        else
            out << "none,nan,nan";
        out << ',' << s.spectral_modes << "\n";
    }
}

void write_rate_csv(std::ostream& out, const OutputHeader& header, const RateFit& fit)
{
    write_header(out, header);
    out << kRateColumns << "\n";
    out << format_double(fit.slope) << ',' << format_double(fit.intercept) << ',' << format_double(fit.r_squared)
        << ',' << fit.n_points << "\n";
}

void write_plot_script(std::ostream& out, const std::string& data_file, const std::optional<RateFit>& fit)
{
    out << "# gnuplot -p plot_mse.gp\n"
           "set datafile separator ','\n"
           "set datafile commentschars '#'\n"
           "set key autotitle columnhead\n"
           "set logscale xy\n"
           "set xlabel 'nu'\n"
           "set ylabel 'MSE'\n"
           "set grid\n";
    out << "plot '" << data_file << "' using 1:7 with linespoints pt 7 title 'Monte Carlo MSE'";
    if (fit) {
        out << ", \\\n     exp(" << format_double(fit->intercept) << ")*x**(" << format_double(fit->slope)
            << ") with lines dt 2 title 'fit slope " << format_double(fit->slope) << "'";
    }
    out << "\n";
}

nlohmann::json estimate_json(const OutputHeader& header, const std::vector<EstimateRecord>& rows)
{
    nlohmann::json j;
    j["header"] = header_json(header);
    j["estimates"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json e;
        e["estimator"] = r.estimator;
        e["y0"] = num(r.y0);
        e["t0"] = num(r.t0);
        e["status"] = r.status;
        e["clipped"] = r.clipped;
        e["spectral_modes"] = r.spectral_modes;
        if (r.result) {
            e["theta_hat"] = num(r.result->theta_hat);
            e["fisher"] = num(r.result->fisher);
            e["stderr"] = num(r.result->standard_error);
            e["ci"] = {num(r.result->ci.lo), num(r.result->ci.hi)};
            e["alpha_bar"] = r.result->alpha_bar;
            e["n_increments"] = r.result->n_increments;
            if (r.result->window) {
                const auto& w = *r.result->window;
                e["window"] = {{"y0", w.y0}, {"t0", w.t0}, {"delta_y", w.delta_y}, {"delta_t", w.delta_t}};
            }
        }
        j["estimates"].push_back(e);
    }
    return j;
}

nlohmann::json mc_json(const OutputHeader& header, const MCResult& mc, const std::optional<RateFit>& fit,
                       const std::optional<RateFit>& subset_fit)
{
    nlohmann::json j;
    j["header"] = header_json(header);
    j["per_nu"] = nlohmann::json::array();
    for (const auto& s : mc.per_nu) {
        nlohmann::json e;
        e["nu"] = s.nu;
        e["truth"] = s.truth;
        e["runs"] = s.runs.size();
        e["used"] = s.used;
        e["blowups"] = s.blowups;
        e["mse"] = num(s.mse);
        e["bias"] = num(s.bias);
        e["variance"] = num(s.variance);
        e["coverage"] = num(s.diagnostics.coverage);
        e["z_mean"] = num(s.diagnostics.z_mean);
        e["z_variance"] = num(s.diagnostics.z_variance);
        e["ks_distance"] = num(s.diagnostics.ks_distance);
        if (s.mesh) {
            e["mesh"] = {{"status", mesh_status_name(s.mesh->status)},
                         {"ratio_t", num(s.mesh->ratio_t)},
                         {"ratio_y", num(s.mesh->ratio_y)},
                         {"first_increment_ratio", num(s.mesh->first_increment_ratio)}};
        }
        j["per_nu"].push_back(e);
    }
    auto rate = [](const RateFit& f) {
        return nlohmann::json{
            {"slope", num(f.slope)}, {"intercept", num(f.intercept)}, {"r2", num(f.r_squared)}, {"n_points", f.n_points}};
    };
    if (fit) j["rate"] = rate(*fit);
    if (subset_fit) j["rate_subset"] = rate(*subset_fit);
    return j;
}

void write_text_file(const std::filesystem::path& dir, const std::string& name, const std::string& text)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorCode::Io, "cannot create directory " + dir.string() + ": " + ec.message());
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
    out << text;
    if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

std::vector<std::pair<double, double>> read_mse_table(std::istream& in, std::optional<double> truth)
{
    std::string line;
    std::vector<std::string> columns;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        if (line[0] == '#') {
            auto pos = line.find("truth=");
            if (!truth && pos != std::string::npos) truth = parse_double(split_csv(line.substr(pos + 6)).at(0), lineno);
            continue;
        }
        columns = split_csv(line);
        break;
    }
    if (columns.empty()) fail(ErrorCode::Config, "rate input has no header row");
    auto find = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        return std::nullopt;
    };
    const auto c_nu = find("nu");
    if (!c_nu) fail(ErrorCode::Config, "rate input has no 'nu' column");
    const auto c_mse = find("mse");
    const auto c_theta = find("theta_hat");
    const auto c_blowup = find("blowup");
    if (!c_mse && !c_theta) fail(ErrorCode::Config, "rate input needs an 'mse' or a 'theta_hat' column");
    if (!c_mse && !truth) fail(ErrorCode::Config, "rate input has per-run estimates but no true theta");

    std::vector<std::pair<double, double>> points;
    // per-run input: squared errors grouped by nu in order of first appearance
    std::vector<double> order;
    std::map<double, std::vector<double>> sq;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r" || line[0] == '#') continue;
        auto cells = split_csv(line);
        if (cells.size() != columns.size())
            fail(ErrorCode::Config, "line " + std::to_string(lineno) + ": expected " +
                                        std::to_string(columns.size()) + " fields");
        double nu = parse_double(cells[*c_nu], lineno);
        if (c_mse) {
            points.emplace_back(nu, parse_double(cells[*c_mse], lineno));
            continue;
        }
        if (c_blowup && parse_double(cells[*c_blowup], lineno) != 0.0) continue;
        double e = parse_double(cells[*c_theta], lineno) - *truth;
        if (!sq.count(nu)) order.push_back(nu);
        sq[nu].push_back(e * e);
    }
    for (double nu : order) {
        const auto& v = sq[nu];
        points.emplace_back(nu, pairwise_sum(v) / static_cast<double>(v.size()));
    }
    return points;
}

}  // namespace spdelab
