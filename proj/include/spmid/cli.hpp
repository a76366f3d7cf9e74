#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spmid/estimate.hpp"
#include "spmid/r0.hpp"

namespace spmid::cli {

/// Everything a command needs. Loaded from the --config JSON file (relative
/// paths resolved against the file's directory) and then overridden by flags.
struct RunConfig {
    std::filesystem::path params_file;
    std::filesystem::path ocv_file;
    std::filesystem::path profile_file;
    std::vector<std::filesystem::path> eis_files;
    std::filesystem::path output_dir = "out";

    std::vector<double> dods;
    double f_min_hz = 2e-4;
    double f_max_hz = 5e3;
    int points_per_decade = 6;
    double r_extra_ohm = 0.0;

    std::vector<double> rct_ohm_per_dod;  // fixed R_ct per EIS file; regressed when empty
    FitOptions fit;
    LandscapeOptions landscape;
    R0Options r0;
    bool trace = false;

    double time_dt_s = 1.0;
    int time_n_points = 20;
    double time_slope_scale_plus = 1.0;
    double time_dod = 0.1;
    std::optional<double> time_r0_ohm;
    bool time_states = false;

    bool force = false;
    std::uint64_t seed = 0;
    unsigned threads = 1;
};

RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir,
                       const std::string& source);

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNonConvergence = 3;
inline constexpr int kExitIo = 4;

/// Runs the command line; never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Individual commands, callable without going through argument parsing.
// Each validates its inputs and computes everything before writing any file.
std::vector<std::filesystem::path> cmd_simulate_eis(const RunConfig& cfg);
std::vector<std::filesystem::path> cmd_r0(const RunConfig& cfg);
std::vector<std::filesystem::path> cmd_fit(const RunConfig& cfg);
std::vector<std::filesystem::path> cmd_landscape(const RunConfig& cfg);
std::vector<std::filesystem::path> cmd_simulate_time(const RunConfig& cfg);

}  // namespace spmid::cli
