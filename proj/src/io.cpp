#include "spmid/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "spmid/constants.hpp"
#include "spmid/errors.hpp"

namespace spmid::io {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

struct CsvTable {
    std::vector<std::vector<double>> rows;
    std::vector<std::size_t> line_numbers;
    std::map<std::string, std::string> meta;
};

double parse_double(const std::string& cell, const std::string& source, std::size_t line) {
    const std::string t = trim(cell);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw ParseError(source, line, "cannot parse number '" + t + "'");
    }
    return v;
}

CsvTable parse_csv(const std::string& text, const std::string& source,
                   const std::string& expected_header) {
    CsvTable table;
    std::istringstream in(text);
    std::string raw;
    std::size_t line_no = 0;
    bool header_seen = false;
    const std::size_t columns =
        static_cast<std::size_t>(std::count(expected_header.begin(), expected_header.end(), ',')) + 1;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string body = trim(std::string_view(line).substr(1));
            const auto eq = body.find('=');
            if (eq != std::string::npos) {
                table.meta[trim(std::string_view(body).substr(0, eq))] =
                    trim(std::string_view(body).substr(eq + 1));
            }
            continue;
        }
        if (!header_seen) {
            std::string norm;
            for (char c : line) {
                if (!std::isspace(static_cast<unsigned char>(c))) norm.push_back(c);
            }
            if (norm != expected_header) {
                throw ParseError(source, line_no,
                                 "expected header '" + expected_header + "', got '" + line + "'");
            }
            header_seen = true;
            continue;
        }
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            const auto comma = line.find(',', start);
            row.push_back(parse_double(line.substr(start, comma - start), source, line_no));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (row.size() != columns) {
            throw ParseError(source, line_no,
                             "expected " + std::to_string(columns) + " columns, got " +
                                 std::to_string(row.size()));
        }
        table.rows.push_back(std::move(row));
        table.line_numbers.push_back(line_no);
    }
    if (!header_seen) throw ParseError(source, line_no, "missing header '" + expected_header + "'");
    if (table.rows.empty()) throw ParseError(source, line_no, "no data rows");
    return table;
}

double meta_number(const CsvTable& t, const std::string& key, const std::string& source) {
    const std::string& v = t.meta.at(key);
    return parse_double(v, source + " (metadata " + key + ")", 0);
}

std::string source_name(const std::filesystem::path& p) { return p.string(); }

}  // namespace

std::string format_number(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw Error(ErrorKind::Io, "number formatting failed");
    return std::string(buf, ptr);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error while reading " + path.string());
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    out.close();
    if (!out) throw IoError("error while writing " + path.string());
}

EisSpectrum parse_eis_csv(const std::string& text, const std::string& source) {
    const auto table = parse_csv(text, source, "freq_hz,z_real_ohm,z_imag_ohm");
    EisSpectrum s;
    if (table.meta.count("dod")) s.dod = meta_number(table, "dod", source);
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& r = table.rows[k];
        if (!(r[0] > 0.0)) {
            throw ParseError(source, table.line_numbers[k], "frequency must be positive");
        }
        s.points.push_back({2.0 * kPi * r[0], cplx(r[1], r[2])});
    }
    try {
        validate(s);
    } catch (const Error& e) {
        throw ParseError(source, 0, e.what());
    }
    return s;
}

EisSpectrum read_eis_csv(const std::filesystem::path& path) {
    return parse_eis_csv(read_text_file(path), source_name(path));
}

std::string to_eis_csv(const EisSpectrum& spectrum) {
    std::string out = "# dod=" + format_number(spectrum.dod) + "\n";
    out += "freq_hz,z_real_ohm,z_imag_ohm\n";
    for (const auto& p : spectrum.points) {
        out += format_number(p.omega / (2.0 * kPi)) + "," + format_number(p.z.real()) + "," +
               format_number(p.z.imag()) + "\n";
    }
    return out;
}

OcvPair parse_ocv_csv(const std::string& text, const std::string& source) {
    const auto table = parse_csv(text, source, "q_coulomb,u_plus_volt,u_minus_volt");
    std::vector<OcvCurve::Sample> plus;
    std::vector<OcvCurve::Sample> minus;
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& r = table.rows[k];
        if (k > 0 && !(r[0] > table.rows[k - 1][0])) {
            throw ParseError(source, table.line_numbers[k], "capacity column must be strictly increasing");
        }
        plus.push_back({r[0], r[1]});
        minus.push_back({r[0], r[2]});
    }
    const double total = table.meta.count("total_capacity")
                             ? meta_number(table, "total_capacity", source)
                             : table.rows.back()[0];
    try {
        return OcvPair{OcvCurve(Electrode::Positive, std::move(plus), total),
                       OcvCurve(Electrode::Negative, std::move(minus), total)};
    } catch (const Error& e) {
        throw ParseError(source, 0, e.what());
    }
}

OcvPair read_ocv_csv(const std::filesystem::path& path) {
    return parse_ocv_csv(read_text_file(path), source_name(path));
}

CurrentProfile parse_profile_csv(const std::string& text, const std::string& source) {
    const auto table = parse_csv(text, source, "t_s,i_a");
    std::vector<CurrentProfile::Sample> samples;
    for (const auto& r : table.rows) samples.push_back({r[0], r[1]});
    try {
        return CurrentProfile(std::move(samples));
    } catch (const Error& e) {
        throw ParseError(source, 0, e.what());
    }
}

CurrentProfile read_profile_csv(const std::filesystem::path& path) {
    return parse_profile_csv(read_text_file(path), source_name(path));
}

std::string to_time_series_csv(const TimeSeries& ts, bool with_states) {
    std::string out = with_states ? "t_s,v_dev_volt,x_surf_plus_c,x_surf_minus_c\n"
                                  : "t_s,v_dev_volt\n";
    for (std::size_t k = 0; k < ts.t.size(); ++k) {
        out += format_number(ts.t[k]) + "," + format_number(ts.v_dev[k]);
        if (with_states) {
            out += "," + format_number(ts.x_surf_plus[k]) + "," + format_number(ts.x_surf_minus[k]);
        }
        out += "\n";
    }
    return out;
}

std::string to_landscape_csv(const LandscapeGrid& grid) {
    std::string out = "nan";
    for (double tm : grid.tau_minus_axis) out += "," + format_number(tm);
    out += "\n";
    for (std::size_t i = 0; i < grid.tau_plus_axis.size(); ++i) {
        out += format_number(grid.tau_plus_axis[i]);
        for (std::size_t j = 0; j < grid.tau_minus_axis.size(); ++j) {
            out += "," + format_number(grid.at(i, j));
        }
        out += "\n";
    }
    return out;
}

nlohmann::json to_json(const FitResult& r) {
    nlohmann::json j;
    j["tau_d_plus"] = r.tau_d_plus;
    j["tau_d_minus"] = r.tau_d_minus;
    j["dods"] = r.dods;
    j["r_ct_per_dod"] = r.r_ct_per_dod;
    j["loss"] = r.loss;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["per_dod_rms"] = r.per_dod_rms;
    j["curvature"] = {{"ln_tau_plus", r.curvature_plus},
                      {"ln_tau_minus", r.curvature_minus},
                      {"flat_plus", r.flat_plus},
                      {"flat_minus", r.flat_minus}};
    if (r.swapped) {
        j["swapped_candidate"] = {{"tau_d_plus", r.swapped->tau_plus},
                                  {"tau_d_minus", r.swapped->tau_minus},
                                  {"loss", r.swapped->loss}};
    } else {
        j["swapped_candidate"] = nullptr;
    }
    auto starts = nlohmann::json::array();
    for (const auto& s : r.starts) {
        starts.push_back({{"start_tau_plus", s.start_tau_plus},
                          {"start_tau_minus", s.start_tau_minus},
                          {"tau_plus", s.tau_plus},
                          {"tau_minus", s.tau_minus},
                          {"loss", s.loss},
                          {"iterations", s.iterations},
                          {"converged", s.converged}});
    }
    j["starts"] = starts;
    return j;
}

namespace {

double require_number(const nlohmann::json& j, const char* key, const std::string& source) {
    if (!j.contains(key) || !j.at(key).is_number()) {
        throw ParseError(source, 0, std::string("missing numeric field '") + key + "'");
    }
    return j.at(key).get<double>();
}

}  // namespace

ParamsFile parse_params_json(const std::string& text, const std::string& source) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source, 0, e.what());
    }
    if (!j.is_object()) throw ParseError(source, 0, "parameter file must be a JSON object");
    if (!j.contains("schema_version") || j.at("schema_version") != 1) {
        throw ParseError(source, 0, "schema_version: 1 is required");
    }
    ParamsFile pf;
    if (j.contains("R_plus") || j.contains("D_plus")) {
        PhysicalParams p;
        auto electrode = [&](ElectrodeParams& e, const std::string& tag) {
            e.thickness = require_number(j, ("delta_" + tag).c_str(), source);
            e.particle_radius = require_number(j, ("R_" + tag).c_str(), source);
            e.volume_fraction = require_number(j, ("eps_" + tag).c_str(), source);
            e.diffusivity = require_number(j, ("D_" + tag).c_str(), source);
            e.rate_constant = require_number(j, ("k_" + tag).c_str(), source);
            e.c_max = require_number(j, ("c_max_" + tag).c_str(), source);
        };
        electrode(p.positive, "plus");
        electrode(p.negative, "minus");
        p.area = require_number(j, "A", source);
        p.c_electrolyte = require_number(j, "c_e", source);
        if (j.contains("T")) p.temperature = require_number(j, "T", source);
        try {
            validate(p);
        } catch (const Error& e) {
            throw ParseError(source, 0, e.what());
        }
        pf.physical = p;
    }
    if (j.contains("tau_d_plus")) {
        IdentifiableParams ip;
        ip.tau_d_plus = require_number(j, "tau_d_plus", source);
        ip.tau_d_minus = require_number(j, "tau_d_minus", source);
        ip.r_ct0 = j.contains("R_ct0") ? require_number(j, "R_ct0", source) : 0.0;
        try {
            validate(ip);
        } catch (const Error& e) {
            throw ParseError(source, 0, e.what());
        }
        pf.identifiable = ip;
    }
    if (j.contains("x0_plus_at_dod0")) pf.x0_plus_at_dod0 = require_number(j, "x0_plus_at_dod0", source);
    if (j.contains("x0_minus_at_dod0")) pf.x0_minus_at_dod0 = require_number(j, "x0_minus_at_dod0", source);
    if (!pf.physical && !pf.identifiable) {
        throw ParseError(source, 0, "parameter file holds neither physical nor identifiable parameters");
    }
    return pf;
}

ParamsFile read_params_json(const std::filesystem::path& path) {
    return parse_params_json(read_text_file(path), source_name(path));
}

nlohmann::json to_json(const PhysicalParams& p) {
    nlohmann::json j;
    j["schema_version"] = 1;
    auto electrode = [&](const ElectrodeParams& e, const std::string& tag) {
        j["delta_" + tag] = e.thickness;
        j["R_" + tag] = e.particle_radius;
        j["eps_" + tag] = e.volume_fraction;
        j["D_" + tag] = e.diffusivity;
        j["k_" + tag] = e.rate_constant;
        j["c_max_" + tag] = e.c_max;
    };
    electrode(p.positive, "plus");
    electrode(p.negative, "minus");
    j["A"] = p.area;
    j["c_e"] = p.c_electrolyte;
    j["T"] = p.temperature;
    return j;
}

}  // namespace spmid::io
