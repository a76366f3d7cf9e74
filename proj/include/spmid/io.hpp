#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"
#include "spmid/estimate.hpp"
#include "spmid/impedance.hpp"
#include "spmid/ocv.hpp"
#include "spmid/params.hpp"
#include "spmid/r0.hpp"
#include "spmid/timedomain.hpp"

namespace spmid::io {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_number(double v);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);

// EIS: header freq_hz,z_real_ohm,z_imag_ohm; optional "# dod=<value>".
EisSpectrum parse_eis_csv(const std::string& text, const std::string& source);
EisSpectrum read_eis_csv(const std::filesystem::path& path);
std::string to_eis_csv(const EisSpectrum& spectrum);

// OCV: header q_coulomb,u_plus_volt,u_minus_volt. Total capacity comes from
// an optional "# total_capacity=<C>" line, else from the last capacity sample.
struct OcvPair {
    OcvCurve plus;
    OcvCurve minus;
};
OcvPair parse_ocv_csv(const std::string& text, const std::string& source);
OcvPair read_ocv_csv(const std::filesystem::path& path);

// Current profile: header t_s,i_a.
CurrentProfile parse_profile_csv(const std::string& text, const std::string& source);
CurrentProfile read_profile_csv(const std::filesystem::path& path);

std::string to_time_series_csv(const TimeSeries& ts, bool with_states);

/// First row: corner cell then the tau- axis; first column: the tau+ axis.
std::string to_landscape_csv(const LandscapeGrid& grid);

nlohmann::json to_json(const FitResult& r);

/// Parameter file contents. Either the full physical set or the identifiable
/// triple must be present; schema_version must be 1.
struct ParamsFile {
    std::optional<PhysicalParams> physical;
    std::optional<IdentifiableParams> identifiable;
    std::optional<double> x0_plus_at_dod0;
    std::optional<double> x0_minus_at_dod0;
};
ParamsFile parse_params_json(const std::string& text, const std::string& source);
ParamsFile read_params_json(const std::filesystem::path& path);
nlohmann::json to_json(const PhysicalParams& p);

}  // namespace spmid::io
