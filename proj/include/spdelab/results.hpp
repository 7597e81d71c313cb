#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "spdelab/experiments.hpp"

namespace spdelab {

/// %.17g; "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double x);

/// Leading "# key=value" lines of every output file.
struct OutputHeader {
    std::string kind;
    std::uint64_t base_seed = 0;
    std::vector<std::pair<std::string, std::string>> fields;

    void add(std::string key, std::string value) { fields.emplace_back(std::move(key), std::move(value)); }
    void add(std::string key, double value) { add(std::move(key), format_double(value)); }
};

void write_header(std::ostream& out, const OutputHeader& header);

/// One line of estimate.csv.
struct EstimateRecord {
    std::string estimator;
    /// Evaluation point for local and nonparametric estimates; NaN otherwise.
    double y0;
    double t0;
    std::optional<EstimateResult> result;
    bool clipped = false;
    std::size_t spectral_modes = 0;
    /// "ok" or the error code name of a per-point failure.
    std::string status = "ok";

    EstimateRecord();
};

inline constexpr const char* kEstimateColumns =
    "estimator,y0,t0,theta_hat,fisher,stderr,ci_lo,ci_hi,alpha_bar,n_increments,"
    "window_y0,window_t0,window_delta_y,window_delta_t,clipped,spectral_modes,status";
inline constexpr const char* kMcColumns = "nu,run,seed,theta_hat,fisher,ci_lo,ci_hi,covered,blowup";
inline constexpr const char* kDiagnosticsColumns =
    "nu,truth,runs,used,blowups,blowup_fraction,mse,bias,variance,coverage,z_mean,z_variance,ks_distance,"
    "mesh_status,ratio_t,ratio_y,spectral_modes";
inline constexpr const char* kRateColumns = "slope,intercept,r2,n_points";

void write_estimate_csv(std::ostream& out, const OutputHeader& header, const std::vector<EstimateRecord>& rows);
void write_mc_csv(std::ostream& out, const OutputHeader& header, const MCResult& mc);
void write_diagnostics_csv(std::ostream& out, const OutputHeader& header, const MCResult& mc);
void write_rate_csv(std::ostream& out, const OutputHeader& header, const RateFit& fit);
/// gnuplot script drawing log MSE against log nu from diagnostics.csv (columns 1 and 7).
void write_plot_script(std::ostream& out, const std::string& data_file, const std::optional<RateFit>& fit);

nlohmann::json estimate_json(const OutputHeader& header, const std::vector<EstimateRecord>& rows);
nlohmann::json mc_json(const OutputHeader& header, const MCResult& mc, const std::optional<RateFit>& fit,
                       const std::optional<RateFit>& subset_fit);

/// Writes `text` to dir/name, creating dir.
void write_text_file(const std::filesystem::path& dir, const std::string& name, const std::string& text);

/// (nu, mse) pairs from a CSV with a header row. Uses the "mse" column when
/// present; otherwise averages (theta_hat - truth)^2 per nu over rows with
/// blowup = 0. `truth` defaults to a "# truth=" header line.
std::vector<std::pair<double, double>> read_mse_table(std::istream& in, std::optional<double> truth = std::nullopt);

}  // namespace spdelab
